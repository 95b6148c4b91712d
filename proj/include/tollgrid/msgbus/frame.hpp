#pragma once

// Broker wire format. Every frame is
//
//   u32 total_len (big-endian)   = 2 + topic_len + payload length
//   u16 topic_len (big-endian)   >= 1
//   topic bytes                  [a-z0-9._-]+, sent verbatim, never prefixed
//   payload bytes                opaque (UTF-8 JSON for application topics)
//
// Topics beginning with '_' are broker control topics (see broker.hpp).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tollgrid::msgbus {

inline constexpr std::size_t kMaxPayloadBytes = 16u << 20;
inline constexpr std::size_t kMaxTopicBytes = 255;
// Largest total_len accepted by the decoder.
inline constexpr std::size_t kMaxFrameBody = 2 + kMaxTopicBytes + kMaxPayloadBytes;
inline constexpr std::size_t kHeaderBytes = 6;

// Canonical application topics.
namespace topics {
inline constexpr std::string_view kLocationUpdate = "location.update";
inline constexpr std::string_view kRoute = "route";
inline constexpr std::string_view kSegment = "segment";
inline constexpr std::string_view kToll = "toll";
inline constexpr std::string_view kSimConfig = "sim.config";
inline constexpr std::string_view kSimConfigResult = "sim.config.result";
inline constexpr std::string_view kRegistryHeartbeat = "registry.heartbeat";
}  // namespace topics

// Control topics.
inline constexpr std::string_view kSubscribePrefix = "_sub.";
inline constexpr std::string_view kUnsubscribePrefix = "_unsub.";
inline constexpr std::string_view kSubscribedPrefix = "_subok.";
inline constexpr std::string_view kPing = "_ping";
inline constexpr std::string_view kPong = "_pong";

struct Frame {
  std::string topic;
  std::string payload;

  bool operator==(const Frame&) const = default;
};

bool is_valid_topic(std::string_view topic);
// Throws ProtocolError naming the problem.
void validate_topic(std::string_view topic);

// Throws ProtocolError for a bad topic and SizeError for an oversized payload.
std::vector<std::uint8_t> encode_frame(std::string_view topic, std::string_view payload);

struct DecodeResult {
  // Empty when more bytes are needed.
  std::optional<Frame> frame;
  // Bytes consumed from the input: total_len + 4 for a frame, 0 otherwise.
  std::size_t consumed = 0;
};

// Decodes at most one frame from the front of `bytes`. Throws ProtocolError
// on an oversized declared length or an invalid topic.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes);

// Streaming decoder: feed arbitrary chunks, pull complete frames.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<Frame> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace tollgrid::msgbus
