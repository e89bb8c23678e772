#include "netobs/broker/frame.hpp"

namespace netobs::broker {

const char* to_string(Command c) {
    switch (c) {
        case Command::Hello: return "HELLO";
        case Command::HelloOk: return "HELLO_OK";
        case Command::Send: return "SEND";
        case Command::Deliver: return "DELIVER";
        case Command::Pub: return "PUB";
        case Command::DeliverPub: return "DELIVER_PUB";
        case Command::Sub: return "SUB";
        case Command::Unsub: return "UNSUB";
        case Command::Ping: return "PING";
        case Command::Pong: return "PONG";
        case Command::Error: return "ERROR";
        case Command::Bye: return "BYE";
    }
    return "?";
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::size_t v) {
    out.push_back((std::uint8_t)((v >> 8) & 0xff));
    out.push_back((std::uint8_t)(v & 0xff));
}

void put_field(std::vector<std::uint8_t>& out, const std::string& s) {
    if (s.size() > 0xffff) throw FrameError("field longer than 65535 bytes");
    put_u16(out, s.size());
    out.insert(out.end(), s.begin(), s.end());
}

} // namespace

std::vector<std::uint8_t> encode(const Frame& f) {
    std::vector<std::uint8_t> body;
    body.push_back(f.version);
    body.push_back((std::uint8_t)f.command);
    put_field(body, f.source);
    put_field(body, f.destination);
    put_field(body, f.correlation);
    put_field(body, f.payload);

    std::vector<std::uint8_t> out;
    out.reserve(body.size() + 4);
    std::uint32_t len = (std::uint32_t)body.size();
    out.push_back((std::uint8_t)((len >> 24) & 0xff));
    out.push_back((std::uint8_t)((len >> 16) & 0xff));
    out.push_back((std::uint8_t)((len >> 8) & 0xff));
    out.push_back((std::uint8_t)(len & 0xff));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Frame decode_body(std::span<const std::uint8_t> body) {
    std::size_t i = 0;
    auto need = [&](std::size_t n) {
        if (i + n > body.size()) throw FrameError("truncated frame");
    };
    need(2);
    Frame f;
    f.version = body[i++];
    if (f.version != 1) throw FrameError("unsupported version");
    std::uint8_t cmd = body[i++];
    if (cmd < 1 || cmd > 12) throw FrameError("unknown command");
    f.command = (Command)cmd;

    auto read_field = [&]() {
        need(2);
        std::size_t n = ((std::size_t)body[i] << 8) | body[i + 1];
        i += 2;
        need(n);
        std::string s((const char*)body.data() + i, n);
        i += n;
        return s;
    };
    f.source = read_field();
    f.destination = read_field();
    f.correlation = read_field();
    f.payload = read_field();
    if (i != body.size()) throw FrameError("trailing bytes");
    return f;
}

bool decode(std::span<const std::uint8_t> buffer, Frame& out, std::size_t& consumed) {
    if (buffer.size() < 4) return false;
    std::uint32_t len = ((std::uint32_t)buffer[0] << 24) |
                        ((std::uint32_t)buffer[1] << 16) |
                        ((std::uint32_t)buffer[2] << 8) | buffer[3];
    if (buffer.size() < 4 + (std::size_t)len) return false;
    out = decode_body(buffer.subspan(4, len));
    consumed = 4 + (std::size_t)len;
    return true;
}

bool valid_client_name(const std::string& name) {
    if (name.empty() || name.size() > 255) return false;
    return name.find('/') == std::string::npos;
}

bool valid_topic(const std::string& topic) {
    if (topic.empty() || topic.size() > 255) return false;
    if (topic.front() == '/' || topic.back() == '/') return false;
    if (topic.find("//") != std::string::npos) return false;
    return true;
}

namespace {

std::vector<std::string> split_segments(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t slash = s.find('/', start);
        if (slash == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, slash - start));
        start = slash + 1;
    }
}

} // namespace

bool valid_pattern(const std::string& pattern) {
    if (!valid_topic(pattern)) return false;
    auto segs = split_segments(pattern);
    for (std::size_t i = 0; i < segs.size(); ++i)
        if (segs[i] == "*" && i + 1 != segs.size()) return false;
    return true;
}

bool topic_matches(const std::string& pattern, const std::string& topic) {
    auto ps = split_segments(pattern);
    auto ts = split_segments(topic);
    bool wildcard = !ps.empty() && ps.back() == "*";
    if (wildcard) {
        std::size_t fixed = ps.size() - 1;
        if (ts.size() < fixed) return false;
        for (std::size_t i = 0; i < fixed; ++i)
            if (ps[i] != ts[i]) return false;
        return true;
    }
    return ps == ts;
}

} // namespace netobs::broker
