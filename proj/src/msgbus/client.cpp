#include "tollgrid/msgbus/client.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <vector>

#include "socket.hpp"
#include "tollgrid/error.hpp"

namespace tollgrid::msgbus {

void Inbox::push(Frame frame) {
  {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(frame));
  }
  cv_.notify_one();
}

void Inbox::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::optional<Frame> Inbox::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; });
  if (items_.empty()) return std::nullopt;
  Frame f = std::move(items_.front());
  items_.pop_front();
  return f;
}

std::optional<Frame> Inbox::try_pop() {
  std::lock_guard lock(mu_);
  if (items_.empty()) return std::nullopt;
  Frame f = std::move(items_.front());
  items_.pop_front();
  return f;
}

bool Inbox::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::size_t Inbox::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

BusClient::BusClient(const Endpoint& broker) : endpoint_(broker) {
  fd_ = detail::connect_tcp(broker).release();
  connected_ = true;
  reader_ = std::thread([this] { reader_loop(); });
}

BusClient::~BusClient() {
  close();
  if (reader_.joinable()) reader_.join();
  if (fd_ >= 0) ::close(fd_);
}

void BusClient::close() {
  std::lock_guard lock(mu_);
  if (connected_) ::shutdown(fd_, SHUT_RDWR);
}

bool BusClient::connected() const {
  std::lock_guard lock(mu_);
  return connected_;
}

void BusClient::send_frame(std::string_view topic, std::string_view payload) {
  auto bytes = encode_frame(topic, payload);
  std::lock_guard lock(write_mu_);
  if (!connected()) throw TransportError("not connected to " + endpoint_.to_string());
  detail::send_all(fd_, bytes);
}

void BusClient::publish(std::string_view topic, std::string_view payload) {
  validate_topic(topic);
  if (topic.front() == '_') throw ProtocolError("cannot publish to control topic");
  send_frame(topic, payload);
}

std::shared_ptr<Inbox> BusClient::subscribe(std::string_view topic,
                                            std::chrono::milliseconds timeout) {
  return subscribe(topic, nullptr, timeout);
}

std::shared_ptr<Inbox> BusClient::subscribe(std::string_view topic, std::shared_ptr<Inbox> target,
                                            std::chrono::milliseconds timeout) {
  validate_topic(topic);
  if (topic.front() == '_') throw ProtocolError("cannot subscribe to control topic");
  std::shared_ptr<Inbox> inbox;
  {
    std::lock_guard lock(mu_);
    auto it = inboxes_.find(topic);
    if (it != inboxes_.end() && confirmed_.contains(topic)) return it->second;
    if (it == inboxes_.end()) {
      if (!target) target = std::make_shared<Inbox>(std::string(topic));
      it = inboxes_.emplace(std::string(topic), std::move(target)).first;
    }
    inbox = it->second;
  }
  send_frame(std::string(kSubscribePrefix) + std::string(topic), {});
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return confirmed_.contains(topic) || !connected_; }) ||
      !connected_) {
    throw TransportError("subscription to '" + std::string(topic) + "' not confirmed");
  }
  return inbox;
}

void BusClient::unsubscribe(std::string_view topic) {
  send_frame(std::string(kUnsubscribePrefix) + std::string(topic), {});
  std::lock_guard lock(mu_);
  auto it = inboxes_.find(topic);
  if (it != inboxes_.end()) {
    auto inbox = it->second;
    inboxes_.erase(it);
    const bool shared = std::any_of(inboxes_.begin(), inboxes_.end(),
                                    [&](const auto& kv) { return kv.second == inbox; });
    if (!shared) inbox->close();
  }
  if (auto c = confirmed_.find(topic); c != confirmed_.end()) confirmed_.erase(c);
}

void BusClient::flush(std::chrono::milliseconds timeout) {
  std::uint64_t target;
  {
    std::lock_guard lock(mu_);
    target = pongs_ + 1;
  }
  send_frame(kPing, {});
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return pongs_ >= target || !connected_; }) ||
      pongs_ < target) {
    throw TransportError("flush not acknowledged by broker");
  }
}

void BusClient::reader_loop() {
  FrameReader reader;
  std::vector<std::uint8_t> buf(64 * 1024);
  try {
    for (;;) {
      const long n = detail::recv_some(fd_, buf);
      if (n <= 0) break;
      reader.feed(std::span(buf.data(), static_cast<std::size_t>(n)));
      while (auto frame = reader.next()) {
        std::string_view topic = frame->topic;
        std::unique_lock lock(mu_);
        if (topic.starts_with(kSubscribedPrefix)) {
          confirmed_.emplace(topic.substr(kSubscribedPrefix.size()));
          lock.unlock();
          cv_.notify_all();
        } else if (topic == kPong) {
          ++pongs_;
          lock.unlock();
          cv_.notify_all();
        } else if (auto it = inboxes_.find(topic); it != inboxes_.end()) {
          auto inbox = it->second;
          lock.unlock();
          inbox->push(std::move(*frame));
        }
      }
    }
  } catch (const ProtocolError&) {
  }
  std::map<std::string, std::shared_ptr<Inbox>, std::less<>> inboxes;
  {
    std::lock_guard lock(mu_);
    connected_ = false;
    inboxes = inboxes_;
  }
  cv_.notify_all();
  for (auto& [t, inbox] : inboxes) inbox->close();
}

std::unique_ptr<BusClient> connect_with_retry(const Endpoint& broker,
                                              const framekit::RetryPolicy& policy,
                                              framekit::Clock& clock) {
  auto result =
      framekit::retry([&] { return std::make_unique<BusClient>(broker); }, policy, clock);
  return std::move(result.value);
}

}  // namespace tollgrid::msgbus
