#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netobs::broker {

enum class Command : std::uint8_t {
    Hello = 1,
    HelloOk = 2,
    Send = 3,
    Deliver = 4,
    Pub = 5,
    DeliverPub = 6,
    Sub = 7,
    Unsub = 8,
    Ping = 9,
    Pong = 10,
    Error = 11,
    Bye = 12,
};

const char* to_string(Command c);

/// Wire-level message unit. Encoding: 4-byte big-endian frame length
/// (of everything after it), version byte, command byte, then four
/// length-prefixed fields (2-byte big-endian length each) in order
/// source, destination/topic, correlation id, payload.
struct Frame {
    std::uint8_t version = 1;
    Command command = Command::Ping;
    std::string source;
    std::string destination;
    std::string correlation;
    std::string payload;

    bool operator==(const Frame&) const = default;
};

class FrameError : public std::runtime_error {
public:
    explicit FrameError(const std::string& why)
        : std::runtime_error("bad frame: " + why) {}
};

std::vector<std::uint8_t> encode(const Frame& f);

/// Decode one full frame (without the leading length word).
Frame decode_body(std::span<const std::uint8_t> body);

/// Decode a length-prefixed frame; `consumed` reports bytes used.
/// Returns false when the buffer does not yet hold a whole frame.
bool decode(std::span<const std::uint8_t> buffer, Frame& out, std::size_t& consumed);

/// Client names: nonempty UTF-8, at most 255 bytes, no '/'.
bool valid_client_name(const std::string& name);

/// Topics are '/'-separated nonempty segments.
bool valid_topic(const std::string& topic);

/// Patterns are exact topics or a prefix with a final '*' segment.
bool valid_pattern(const std::string& pattern);

bool topic_matches(const std::string& pattern, const std::string& topic);

} // namespace netobs::broker
