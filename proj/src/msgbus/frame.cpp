#include "tollgrid/msgbus/frame.hpp"

#include "tollgrid/error.hpp"

namespace tollgrid::msgbus {
namespace {

bool topic_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
}

}  // namespace

bool is_valid_topic(std::string_view topic) {
  if (topic.empty() || topic.size() > kMaxTopicBytes) return false;
  for (char c : topic) {
    if (!topic_char(c)) return false;
  }
  return true;
}

void validate_topic(std::string_view topic) {
  if (topic.empty()) throw ProtocolError("empty topic");
  if (topic.size() > kMaxTopicBytes) {
    throw ProtocolError("topic longer than " + std::to_string(kMaxTopicBytes) + " bytes");
  }
  for (char c : topic) {
    if (!topic_char(c)) {
      throw ProtocolError("invalid character in topic '" + std::string(topic) + "'");
    }
  }
}

std::vector<std::uint8_t> encode_frame(std::string_view topic, std::string_view payload) {
  validate_topic(topic);
  if (payload.size() > kMaxPayloadBytes) {
    throw SizeError("payload of " + std::to_string(payload.size()) + " bytes exceeds 16 MiB");
  }
  const std::uint32_t total = static_cast<std::uint32_t>(2 + topic.size() + payload.size());
  const std::uint16_t tlen = static_cast<std::uint16_t>(topic.size());
  std::vector<std::uint8_t> out;
  out.reserve(4 + total);
  out.push_back(static_cast<std::uint8_t>(total >> 24));
  out.push_back(static_cast<std::uint8_t>(total >> 16));
  out.push_back(static_cast<std::uint8_t>(total >> 8));
  out.push_back(static_cast<std::uint8_t>(total));
  out.push_back(static_cast<std::uint8_t>(tlen >> 8));
  out.push_back(static_cast<std::uint8_t>(tlen));
  out.insert(out.end(), topic.begin(), topic.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) return {};
  const std::uint32_t total = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                              (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
  if (total > kMaxFrameBody) {
    throw ProtocolError("declared frame length " + std::to_string(total) + " exceeds limit");
  }
  if (total < 3) throw ProtocolError("frame too short for a topic");
  if (bytes.size() < kHeaderBytes) return {};
  const std::size_t tlen = (std::size_t{bytes[4]} << 8) | std::size_t{bytes[5]};
  if (tlen == 0 || tlen > total - 2) {
    throw ProtocolError("topic length " + std::to_string(tlen) + " inconsistent with frame");
  }
  if (bytes.size() < 4 + std::size_t{total}) return {};
  Frame frame;
  frame.topic.assign(reinterpret_cast<const char*>(bytes.data() + kHeaderBytes), tlen);
  validate_topic(frame.topic);
  frame.payload.assign(reinterpret_cast<const char*>(bytes.data() + kHeaderBytes + tlen),
                       total - 2 - tlen);
  return {std::move(frame), 4 + std::size_t{total}};
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ * 2 >= buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameReader::next() {
  auto result = decode_frame(std::span(buf_).subspan(pos_));
  pos_ += result.consumed;
  return std::move(result.frame);
}

}  // namespace tollgrid::msgbus
