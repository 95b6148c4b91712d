#include "tollgrid/msgbus/broker.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <chrono>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <list>
#include <mutex>
#include <shared_mutex>
#include <string_view>
#include <thread>
#include <vector>

#include "socket.hpp"
#include "tollgrid/error.hpp"
#include "tollgrid/framekit/log.hpp"
#include "tollgrid/msgbus/frame.hpp"

namespace tollgrid::msgbus {

using framekit::LogLevel;

namespace {

using Payload = std::shared_ptr<const std::string>;

struct Outgoing {
  std::string topic;
  Payload payload;
};

struct SubQueue {
  std::string topic;
  std::deque<Payload> items;
  std::uint64_t dropped = 0;
};

}  // namespace


struct Connection {
  std::uint64_t id = 0;
  detail::Fd fd;
  std::thread reader;
  std::thread writer;

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::shared_ptr<SubQueue>> subs;
  std::deque<Outgoing> control;
  std::size_t rr = 0;
  bool reading_done = false;  // no more frames will be routed from this peer
  bool dead = false;          // writer must stop immediately
  std::atomic<bool> finished{false};
  int threads_left = 2;
};

struct Broker::Impl {
  BrokerOptions options;
  std::uint16_t port = 0;
  detail::Fd listener;
  std::thread acceptor;
  std::atomic<bool> stopping{false};
  bool started = false;

  std::mutex conns_mu;
  std::list<std::shared_ptr<Connection>> conns;
  std::uint64_t next_id = 1;

  // topic -> subscribed (connection, queue) pairs
  std::shared_mutex routes_mu;
  std::map<std::string, std::vector<std::pair<std::shared_ptr<Connection>, std::shared_ptr<SubQueue>>>>
      routes;

  mutable std::mutex stats_mu;
  BrokerStats stats;

  void accept_loop();
  void reap(bool all);
  void reader_loop(const std::shared_ptr<Connection>& c);
  void writer_loop(const std::shared_ptr<Connection>& c);
  void handle_frame(const std::shared_ptr<Connection>& c, Frame frame);
  void subscribe(const std::shared_ptr<Connection>& c, const std::string& topic);
  void unsubscribe(const std::shared_ptr<Connection>& c, const std::string& topic);
  void route(const std::string& topic, Payload payload);
  void drop_routes(const std::shared_ptr<Connection>& c);
  void thread_done(const std::shared_ptr<Connection>& c);
};

Broker::Broker(BrokerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  if (impl_->options.subscription_capacity == 0) {
    throw ContractError("broker: subscription capacity must be > 0");
  }
}

Broker::~Broker() { stop(); }

void Broker::start() {
  if (impl_->started) return;
  impl_->listener = detail::listen_tcp(impl_->options.bind, &impl_->port);
  impl_->started = true;
  impl_->acceptor = std::thread([impl = impl_.get()] { impl->accept_loop(); });
}

void Broker::stop() {
  if (!impl_->started || impl_->stopping.exchange(true)) return;
  impl_->acceptor.join();
  impl_->listener.reset();
  std::vector<std::shared_ptr<Connection>> open;
  {
    std::lock_guard lock(impl_->conns_mu);
    open.assign(impl_->conns.begin(), impl_->conns.end());
  }
  // Stop reading; each writer drains what is already queued, then closes.
  for (auto& c : open) ::shutdown(c->fd.get(), SHUT_RD);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
  for (auto& c : open) {
    while (!c->finished && std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    // A peer that stopped reading cannot be drained.
    if (!c->finished) ::shutdown(c->fd.get(), SHUT_RDWR);
  }
  impl_->reap(true);
}

std::uint16_t Broker::port() const { return impl_->port; }

Endpoint Broker::endpoint() const {
  return Endpoint{impl_->options.bind.host, impl_->port};
}

BrokerStats Broker::stats() const {
  std::lock_guard lock(impl_->stats_mu);
  return impl_->stats;
}

std::unique_ptr<Broker> run_broker(const Endpoint& bind, std::size_t capacity) {
  auto broker = std::make_unique<Broker>(BrokerOptions{bind, capacity});
  broker->start();
  return broker;
}

void Broker::Impl::accept_loop() {
  while (!stopping) {
    reap(false);
    if (!detail::wait_readable(listener.get(), 50)) continue;
    const int raw = ::accept4(listener.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (raw < 0) continue;
    auto c = std::make_shared<Connection>();
    c->fd = detail::Fd(raw);
    {
      std::lock_guard lock(conns_mu);
      c->id = next_id++;
      conns.push_back(c);
    }
    {
      std::lock_guard lock(stats_mu);
      ++stats.connections;
      ++stats.connections_total;
    }
    c->reader = std::thread([this, c] { reader_loop(c); });
    c->writer = std::thread([this, c] { writer_loop(c); });
  }
}

void Broker::Impl::reap(bool all) {
  std::vector<std::shared_ptr<Connection>> done;
  {
    std::lock_guard lock(conns_mu);
    for (auto it = conns.begin(); it != conns.end();) {
      if (all || (*it)->finished) {
        done.push_back(*it);
        it = conns.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : done) {
    if (c->reader.joinable()) c->reader.join();
    if (c->writer.joinable()) c->writer.join();
    c->fd.reset();
  }
}

void Broker::Impl::thread_done(const std::shared_ptr<Connection>& c) {
  bool last = false;
  {
    std::lock_guard lock(c->mu);
    last = --c->threads_left == 0;
  }
  if (last) {
    drop_routes(c);
    {
      std::lock_guard lock(stats_mu);
      --stats.connections;
    }
    c->finished = true;
  }
}

void Broker::Impl::reader_loop(const std::shared_ptr<Connection>& c) {
  FrameReader reader;
  std::vector<std::uint8_t> buf(64 * 1024);
  bool protocol_failure = false;
  try {
    for (;;) {
      const long n = detail::recv_some(c->fd.get(), buf);
      if (n <= 0) break;
      reader.feed(std::span(buf.data(), static_cast<std::size_t>(n)));
      while (auto frame = reader.next()) handle_frame(c, std::move(*frame));
    }
  } catch (const ProtocolError& e) {
    protocol_failure = true;
    framekit::log(LogLevel::kWarn, "broker",
                  "closing connection " + std::to_string(c->id) + ": " + e.what());
    std::lock_guard lock(stats_mu);
    ++stats.protocol_errors;
  }
  // Nothing more will be routed to or from this peer's subscriptions.
  drop_routes(c);
  {
    std::lock_guard lock(c->mu);
    c->reading_done = true;
    if (protocol_failure) c->dead = true;
  }
  c->cv.notify_all();
  if (protocol_failure) ::shutdown(c->fd.get(), SHUT_RDWR);
  thread_done(c);
}

void Broker::Impl::writer_loop(const std::shared_ptr<Connection>& c) {
  std::vector<std::uint8_t> batch;
  std::vector<std::string> batch_topics;
  for (;;) {
    batch.clear();
    batch_topics.clear();
    {
      std::unique_lock lock(c->mu);
      auto pending = [&] {
        if (!c->control.empty()) return true;
        for (auto& [t, q] : c->subs) {
          if (!q->items.empty()) return true;
        }
        return false;
      };
      c->cv.wait(lock, [&] { return c->dead || c->reading_done || pending(); });
      if (c->dead) break;
      if (!pending()) break;  // reading_done and fully drained
      while (!c->control.empty()) {
        auto& o = c->control.front();
        auto f = encode_frame(o.topic, *o.payload);
        batch.insert(batch.end(), f.begin(), f.end());
        c->control.pop_front();
      }
      // Round-robin across subscriptions, bounded batch per wake-up.
      std::vector<std::shared_ptr<SubQueue>> queues;
      for (auto& [t, q] : c->subs) queues.push_back(q);
      std::size_t taken = 0;
      bool progress = true;
      while (progress && taken < 256 && !queues.empty()) {
        progress = false;
        for (std::size_t i = 0; i < queues.size(); ++i) {
          auto& q = queues[(c->rr + i) % queues.size()];
          if (q->items.empty()) continue;
          auto f = encode_frame(q->topic, *q->items.front());
          batch.insert(batch.end(), f.begin(), f.end());
          batch_topics.push_back(q->topic);
          q->items.pop_front();
          ++taken;
          progress = true;
        }
      }
      ++c->rr;
    }
    try {
      detail::send_all(c->fd.get(), batch);
    } catch (const TransportError&) {
      std::lock_guard lock(c->mu);
      c->dead = true;
      break;
    }
    if (!batch_topics.empty()) {
      std::lock_guard lock(stats_mu);
      for (auto& t : batch_topics) ++stats.delivered[t];
    }
  }
  ::shutdown(c->fd.get(), SHUT_RDWR);
  thread_done(c);
}

void Broker::Impl::handle_frame(const std::shared_ptr<Connection>& c, Frame frame) {
  const std::string_view topic = frame.topic;
  if (topic.front() != '_') {
    route(frame.topic, std::make_shared<const std::string>(std::move(frame.payload)));
    return;
  }
  auto app_topic = [&](std::string_view prefix) {
    std::string t(topic.substr(prefix.size()));
    if (!is_valid_topic(t) || t.front() == '_') {
      throw ProtocolError("bad subscription topic '" + t + "'");
    }
    return t;
  };
  if (topic.starts_with(kSubscribePrefix)) {
    subscribe(c, app_topic(kSubscribePrefix));
  } else if (topic.starts_with(kUnsubscribePrefix)) {
    unsubscribe(c, app_topic(kUnsubscribePrefix));
  } else if (topic == kPing) {
    {
      std::lock_guard lock(c->mu);
      c->control.push_back({std::string(kPong), std::make_shared<const std::string>()});
    }
    c->cv.notify_all();
  } else {
    throw ProtocolError("unknown control topic '" + std::string(topic) + "'");
  }
}

void Broker::Impl::subscribe(const std::shared_ptr<Connection>& c, const std::string& topic) {
  std::shared_ptr<SubQueue> q;
  bool fresh = false;
  {
    std::lock_guard lock(c->mu);
    auto& slot = c->subs[topic];
    if (!slot) {
      slot = std::make_shared<SubQueue>();
      slot->topic = topic;
      fresh = true;
    }
    q = slot;
  }
  if (fresh) {
    std::unique_lock lock(routes_mu);
    routes[topic].emplace_back(c, q);
  }
  {
    std::lock_guard lock(c->mu);
    c->control.push_back(
        {std::string(kSubscribedPrefix) + topic, std::make_shared<const std::string>()});
  }
  c->cv.notify_all();
}

void Broker::Impl::unsubscribe(const std::shared_ptr<Connection>& c, const std::string& topic) {
  {
    std::unique_lock lock(routes_mu);
    auto it = routes.find(topic);
    if (it != routes.end()) {
      std::erase_if(it->second, [&](const auto& p) { return p.first == c; });
      if (it->second.empty()) routes.erase(it);
    }
  }
  std::lock_guard lock(c->mu);
  c->subs.erase(topic);
}

void Broker::Impl::route(const std::string& topic, Payload payload) {
  std::vector<std::pair<std::string, std::uint64_t>> drops;
  {
    std::shared_lock lock(routes_mu);
    auto it = routes.find(topic);
    if (it != routes.end()) {
      for (auto& [conn, q] : it->second) {
        {
          std::lock_guard cl(conn->mu);
          if (q->items.size() >= options.subscription_capacity) {
            q->items.pop_front();
            ++q->dropped;
            drops.emplace_back(std::to_string(conn->id) + "/" + topic, 1);
          }
          q->items.push_back(payload);
        }
        conn->cv.notify_all();
      }
    }
  }
  std::lock_guard lock(stats_mu);
  ++stats.published[topic];
  for (auto& [key, n] : drops) stats.dropped[key] += n;
}

void Broker::Impl::drop_routes(const std::shared_ptr<Connection>& c) {
  std::unique_lock lock(routes_mu);
  for (auto it = routes.begin(); it != routes.end();) {
    std::erase_if(it->second, [&](const auto& p) { return p.first == c; });
    it = it->second.empty() ? routes.erase(it) : std::next(it);
  }
}

}  // namespace tollgrid::msgbus
