#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>

#include "tollgrid/framekit/clock.hpp"
#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/msgbus/endpoint.hpp"
#include "tollgrid/msgbus/frame.hpp"

namespace tollgrid::msgbus {

// Unbounded FIFO of frames received for one subscription. Closed when the
// owning client disconnects.
class Inbox {
 public:
  explicit Inbox(std::string topic) : topic_(std::move(topic)) {}

  const std::string& topic() const { return topic_; }

  void push(Frame frame);
  void close();
  // Waits up to `timeout` for a frame. nullopt on timeout or when closed and
  // empty.
  std::optional<Frame> pop(std::chrono::milliseconds timeout);
  std::optional<Frame> try_pop();
  bool closed() const;
  std::size_t size() const;

 private:
  std::string topic_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> items_;
  bool closed_ = false;
};

// Broker connection. Safe to share across threads: publish() may be called
// concurrently; FIFO is guaranteed per client.
class BusClient {
 public:
  // Connects once. Throws TransportError when the broker is unreachable.
  explicit BusClient(const Endpoint& broker);
  ~BusClient();
  BusClient(const BusClient&) = delete;
  BusClient& operator=(const BusClient&) = delete;

  // Returns once the frame is written to the socket. Throws TransportError
  // when disconnected, ProtocolError/SizeError for an invalid frame.
  void publish(std::string_view topic, std::string_view payload);

  // Blocks until the broker confirms the subscription; messages published
  // after that point are delivered to the returned inbox. Subscribing twice
  // to a topic returns the same inbox.
  std::shared_ptr<Inbox> subscribe(std::string_view topic,
                                   std::chrono::milliseconds timeout = std::chrono::seconds(5));
  // Same, but frames are pushed into `target`, which may be shared by
  // several topics so one consumer sees them in arrival order.
  std::shared_ptr<Inbox> subscribe(std::string_view topic, std::shared_ptr<Inbox> target,
                                   std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void unsubscribe(std::string_view topic);

  // Round trip through the broker: when it returns, every frame this client
  // published earlier has been routed.
  void flush(std::chrono::milliseconds timeout = std::chrono::seconds(5));

  bool connected() const;
  void close();
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  void reader_loop();
  void send_frame(std::string_view topic, std::string_view payload);

  Endpoint endpoint_;
  int fd_ = -1;
  std::thread reader_;

  std::mutex write_mu_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Inbox>, std::less<>> inboxes_;
  std::set<std::string, std::less<>> confirmed_;
  std::uint64_t pongs_ = 0;
  bool connected_ = false;
};

// Connects with jittered exponential back-off; throws RetryExhausted.
std::unique_ptr<BusClient> connect_with_retry(const Endpoint& broker,
                                              const framekit::RetryPolicy& policy = {},
                                              framekit::Clock& clock = *framekit::system_clock());

}  // namespace tollgrid::msgbus
