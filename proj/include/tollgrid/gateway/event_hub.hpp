#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tollgrid::gateway {

// Fan-out of event lines to stream clients. Each client has a bounded
// queue; a client whose queue is full when an event arrives is cut off
// rather than slowing everyone else down.
class EventHub {
 public:
  struct Client {
    std::deque<std::string> queue;
    bool cut_off = false;
  };
  using ClientPtr = std::shared_ptr<Client>;

  enum class Wait { kEvent, kTimeout, kCutOff, kClosed };

  explicit EventHub(std::size_t queue_capacity = 1024) : capacity_(queue_capacity) {}

  ClientPtr attach();
  void detach(const ClientPtr& client);
  void publish(const std::string& line);
  // Pops the next line for `client` into `out`.
  Wait next(const ClientPtr& client, std::string& out, std::chrono::milliseconds timeout);
  // Wakes every waiting client with kClosed.
  void close();

  std::size_t clients() const;
  std::uint64_t published() const;
  std::uint64_t cut_off_count() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<ClientPtr> clients_;
  std::uint64_t published_ = 0;
  std::uint64_t cut_off_ = 0;
  bool closed_ = false;
};

}  // namespace tollgrid::gateway
