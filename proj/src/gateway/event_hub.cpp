#include "tollgrid/gateway/event_hub.hpp"

#include <algorithm>

namespace tollgrid::gateway {

EventHub::ClientPtr EventHub::attach() {
  auto c = std::make_shared<Client>();
  std::lock_guard lock(mu_);
  clients_.push_back(c);
  return c;
}

void EventHub::detach(const ClientPtr& client) {
  std::lock_guard lock(mu_);
  clients_.erase(std::remove(clients_.begin(), clients_.end(), client), clients_.end());
}

void EventHub::publish(const std::string& line) {
  {
    std::lock_guard lock(mu_);
    ++published_;
    for (auto& c : clients_) {
      if (c->cut_off) continue;
      if (c->queue.size() >= capacity_) {
        c->cut_off = true;
        c->queue.clear();
        ++cut_off_;
        continue;
      }
      c->queue.push_back(line);
    }
  }
  cv_.notify_all();
}

EventHub::Wait EventHub::next(const ClientPtr& client, std::string& out,
                              std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout,
               [&] { return closed_ || client->cut_off || !client->queue.empty(); });
  if (client->cut_off) return Wait::kCutOff;
  if (!client->queue.empty()) {
    out = std::move(client->queue.front());
    client->queue.pop_front();
    return Wait::kEvent;
  }
  return closed_ ? Wait::kClosed : Wait::kTimeout;
}

void EventHub::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::size_t EventHub::clients() const {
  std::lock_guard lock(mu_);
  return clients_.size();
}

std::uint64_t EventHub::published() const {
  std::lock_guard lock(mu_);
  return published_;
}

std::uint64_t EventHub::cut_off_count() const {
  std::lock_guard lock(mu_);
  return cut_off_;
}

}  // namespace tollgrid::gateway
