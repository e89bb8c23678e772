#include "netobs/broker/tcp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace netobs::broker {

namespace {

constexpr const char* kBrokerLinkMarker = "@broker";

bool write_all(int fd, const std::uint8_t* data, std::size_t n) {
    while (n > 0) {
        ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
        if (w <= 0) {
            if (w < 0 && errno == EINTR) continue;
            return false;
        }
        data += w;
        n -= (std::size_t)w;
    }
    return true;
}

int connect_to(const std::string& host, std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw std::runtime_error("bad address " + host);
    }
    if (::connect(fd, (sockaddr*)&addr, sizeof addr) != 0) {
        ::close(fd);
        throw std::runtime_error("connect to " + host + ":" + std::to_string(port) +
                                 " failed: " + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

class SocketSession : public Session {
public:
    explicit SocketSession(int fd) : fd_(fd) {}

    void deliver(const Frame& frame) override {
        auto bytes = encode(frame);
        std::lock_guard lock(mu_);
        if (fd_ >= 0) write_all(fd_, bytes.data(), bytes.size());
    }

    void invalidate() {
        std::lock_guard lock(mu_);
        fd_ = -1;
    }

private:
    std::mutex mu_;
    int fd_;
};

} // namespace

TcpBroker::TcpBroker(Broker& core, std::uint16_t port) : core_(core) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, (sockaddr*)&addr, sizeof addr) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("bind failed: " + std::string(std::strerror(errno)));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, (sockaddr*)&addr, &len);
    port_ = ntohs(addr.sin_port);
    if (::listen(listen_fd_, 64) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("listen failed");
    }
    accept_thread_ = std::thread([this] { accept_loop(); });
}

TcpBroker::~TcpBroker() { stop(); }

void TcpBroker::stop() {
    bool was_running = running_.exchange(false);
    if (!was_running) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    {
        std::lock_guard lock(mu_);
        for (int fd : fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> readers;
    {
        std::lock_guard lock(mu_);
        readers.swap(readers_);
    }
    for (auto& t : readers)
        if (t.joinable()) t.join();
    {
        std::lock_guard lock(mu_);
        for (int fd : fds_) ::close(fd);
        fds_.clear();
    }
}

void TcpBroker::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (!running_) break;
            if (errno == EINTR) continue;
            break;
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        auto session = std::make_shared<SocketSession>(fd);
        std::lock_guard lock(mu_);
        fds_.push_back(fd);
        readers_.emplace_back(
            [this, fd, session] { reader_loop(fd, session, false); });
    }
}

void TcpBroker::reader_loop(int fd, SessionPtr session, bool is_parent_link) {
    std::vector<std::uint8_t> buffer;
    std::uint8_t chunk[4096];
    bool attached_as_child = false;
    for (;;) {
        ssize_t r = ::recv(fd, chunk, sizeof chunk, 0);
        if (r <= 0) break;
        buffer.insert(buffer.end(), chunk, chunk + r);
        Frame f;
        std::size_t consumed = 0;
        while (decode(buffer, f, consumed)) {
            buffer.erase(buffer.begin(), buffer.begin() + (std::ptrdiff_t)consumed);
            if (!is_parent_link && !attached_as_child &&
                f.command == Command::Hello && f.destination == kBrokerLinkMarker) {
                core_.attach_child(session, f.source);
                attached_as_child = true;
                Frame ok;
                ok.command = Command::HelloOk;
                ok.source = core_.id();
                ok.destination = f.source;
                session->deliver(ok);
                continue;
            }
            core_.handle_frame(session, f);
        }
    }
    core_.detach(session);
    static_cast<SocketSession*>(session.get())->invalidate();
}

void TcpBroker::connect_parent(const std::string& host, std::uint16_t port) {
    int fd = connect_to(host, port);
    auto session = std::make_shared<SocketSession>(fd);
    Frame hello;
    hello.command = Command::Hello;
    hello.source = core_.id();
    hello.destination = kBrokerLinkMarker;
    session->deliver(hello);
    core_.attach_parent(session);
    parent_session_ = session;
    std::lock_guard lock(mu_);
    fds_.push_back(fd);
    readers_.emplace_back([this, fd, session] { reader_loop(fd, session, true); });
}

TcpClient::TcpClient(const std::string& host, std::uint16_t port)
    : fd_(connect_to(host, port)) {}

TcpClient::~TcpClient() { close(); }

void TcpClient::write_frame(const Frame& f) {
    auto bytes = encode(f);
    if (!write_all(fd_, bytes.data(), bytes.size()))
        throw std::runtime_error("broker connection lost");
}

bool TcpClient::hello(const std::string& name, const std::string& tenant) {
    name_ = name;
    Frame f;
    f.command = Command::Hello;
    f.source = name;
    f.payload = tenant;
    write_frame(f);
    auto reply = recv(5000);
    return reply && reply->command == Command::HelloOk;
}

void TcpClient::send(const std::string& to, const std::string& payload,
                     const std::string& correlation) {
    Frame f;
    f.command = Command::Send;
    f.source = name_;
    f.destination = to;
    f.correlation = correlation;
    f.payload = payload;
    write_frame(f);
}

void TcpClient::publish(const std::string& topic, const std::string& payload) {
    Frame f;
    f.command = Command::Pub;
    f.source = name_;
    f.destination = topic;
    f.payload = payload;
    write_frame(f);
}

void TcpClient::subscribe(const std::string& pattern) {
    Frame f;
    f.command = Command::Sub;
    f.source = name_;
    f.destination = pattern;
    write_frame(f);
}

std::optional<Frame> TcpClient::recv(int timeout_ms) {
    for (;;) {
        Frame f;
        std::size_t consumed = 0;
        if (decode(buffer_, f, consumed)) {
            buffer_.erase(buffer_.begin(), buffer_.begin() + (std::ptrdiff_t)consumed);
            return f;
        }
        pollfd pfd{fd_, POLLIN, 0};
        int pr = ::poll(&pfd, 1, timeout_ms);
        if (pr <= 0) return std::nullopt;
        std::uint8_t chunk[4096];
        ssize_t r = ::recv(fd_, chunk, sizeof chunk, 0);
        if (r <= 0) return std::nullopt;
        buffer_.insert(buffer_.end(), chunk, chunk + r);
    }
}

void TcpClient::bye() {
    Frame f;
    f.command = Command::Bye;
    f.source = name_;
    write_frame(f);
}

void TcpClient::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

} // namespace netobs::broker
