#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "tollgrid/msgbus/endpoint.hpp"

namespace tollgrid::msgbus {

struct BrokerOptions {
  Endpoint bind{"127.0.0.1", 4333};
  // Per-subscription buffer; the oldest message is dropped on overflow.
  std::size_t subscription_capacity = 10'000;
};

struct BrokerStats {
  std::map<std::string, std::uint64_t> published;  // by topic
  std::map<std::string, std::uint64_t> delivered;  // by topic, written to a subscriber socket
  std::map<std::string, std::uint64_t> dropped;    // by "<connection id>/<topic>"
  std::uint64_t connections = 0;                   // currently open
  std::uint64_t connections_total = 0;
  std::uint64_t protocol_errors = 0;
};

// Embedded topic-based publish/subscribe broker.
//
// Each accepted connection gets a reader thread that decodes frames and a
// writer thread that drains that connection's subscription queues. A frame
// on an application topic is fanned out to every subscription with exactly
// that topic; per-publisher order is preserved because one reader routes
// that publisher's frames sequentially. Delivery is at-most-once.
//
// Control topics sent by clients:
//   _sub.<topic>    subscribe; answered with _subok.<topic> once active
//   _unsub.<topic>  unsubscribe
//   _ping           answered with _pong after all earlier frames are routed
// Any other topic starting with '_' is a protocol error and closes the
// connection, as does any malformed frame.
class Broker {
 public:
  explicit Broker(BrokerOptions options = {});
  ~Broker();
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  // Binds and starts serving. Throws StartupError on bind failure.
  void start();
  // Stops accepting, drains queued deliveries and closes every connection.
  void stop();

  std::uint16_t port() const;
  Endpoint endpoint() const;
  BrokerStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience: constructs and starts a broker bound to `bind`.
std::unique_ptr<Broker> run_broker(const Endpoint& bind, std::size_t capacity = 10'000);

}  // namespace tollgrid::msgbus
