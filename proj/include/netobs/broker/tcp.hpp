#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "netobs/broker/broker.hpp"

namespace netobs::broker {

/// Stream-socket front end for a Broker: accepts client and child-broker
/// connections and can hold one uplink to a parent broker.
class TcpBroker {
public:
    /// Listens on 127.0.0.1:port (port 0 picks a free one).
    TcpBroker(Broker& core, std::uint16_t port);
    ~TcpBroker();

    std::uint16_t port() const { return port_; }

    /// Open the uplink and attach it as this broker's parent.
    void connect_parent(const std::string& host, std::uint16_t port);

    void stop();

private:
    Broker& core_;
    std::uint16_t port_ = 0;
    int listen_fd_ = -1;
    std::atomic<bool> running_{true};
    std::thread accept_thread_;
    std::mutex mu_;
    std::vector<std::thread> readers_;
    std::vector<int> fds_;
    SessionPtr parent_session_;

    void accept_loop();
    void reader_loop(int fd, SessionPtr session, bool is_parent_link);
};

/// Blocking client for a TCP broker.
class TcpClient {
public:
    TcpClient(const std::string& host, std::uint16_t port);
    ~TcpClient();

    /// Register under `name`; false on NameTaken/InvalidName.
    bool hello(const std::string& name, const std::string& tenant = "");

    void send(const std::string& to, const std::string& payload,
              const std::string& correlation = "");
    void publish(const std::string& topic, const std::string& payload);
    void subscribe(const std::string& pattern);

    std::optional<Frame> recv(int timeout_ms);

    void bye();
    void close();

private:
    int fd_ = -1;
    std::string name_;
    std::vector<std::uint8_t> buffer_;

    void write_frame(const Frame& f);
};

} // namespace netobs::broker
