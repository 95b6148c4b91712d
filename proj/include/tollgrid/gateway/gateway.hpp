#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "tollgrid/framekit/clock.hpp"
#include "tollgrid/framekit/registry.hpp"
#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/gateway/event_hub.hpp"
#include "tollgrid/gateway/state.hpp"
#include "tollgrid/msgbus/client.hpp"

namespace tollgrid::gateway {

struct GatewayOptions {
  msgbus::Endpoint http{"127.0.0.1", 8080};  // port 0 is ephemeral
  msgbus::Endpoint broker{"127.0.0.1", 4333};
  std::size_t route_history = 100;
  std::size_t stream_queue = 1024;  // events buffered per stream client
  std::size_t http_threads = 16;    // each open /events stream holds one
  framekit::RetryPolicy connect_retry{6, 50.0, 2.0, 2'000.0, 0.1};
  std::string ui_dir;  // served under /ui when set
  std::shared_ptr<framekit::Clock> clock = framekit::system_clock();
};

// HTTP entry point:
//   GET  /vehicles         {"stale", "vehicles": [view...]}
//   GET  /vehicles/{id}    view with full route history, 404 if unknown
//   GET  /tolls            {"stale", "tolls": [row...]} highest first
//   GET  /registry         {"services": [record...]}
//   GET  /healthz          200 {"status":"ok"} or 503 {"status":"degraded"}
//   POST /sim/config       200 ack, 400 bad JSON, 422 field errors, 503 no broker
//   GET  /events           newline-delimited {"type", "payload"} events
// Also hosts the service registry, fed by "registry.heartbeat".
class Gateway {
 public:
  explicit Gateway(GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds HTTP and connects to the broker (with retry). Throws StartupError.
  void start();
  void stop();

  int http_port() const;
  bool broker_connected() const { return connected_; }
  const GatewayState& state() const { return state_; }
  framekit::ServiceRegistry& registry() { return registry_; }
  const EventHub& events() const { return hub_; }
  std::uint64_t reconnects() const { return reconnects_; }

 private:
  struct Http;

  void consume_loop();
  bool connect_once();
  void handle(const msgbus::Frame& frame);
  std::int64_t now_ms() const { return options_.clock->now_us() / 1000; }

  GatewayOptions options_;
  GatewayState state_;
  framekit::ServiceRegistry registry_;
  EventHub hub_;
  std::unique_ptr<Http> http_;

  std::mutex client_mu_;
  std::shared_ptr<msgbus::BusClient> client_;
  std::shared_ptr<msgbus::Inbox> inbox_;
  std::thread consumer_;
  std::atomic<bool> stopping_{false};
  std::atomic<bool> connected_{false};
  std::atomic<std::uint64_t> reconnects_{0};
  std::atomic<std::int64_t> last_event_ms_{0};
  bool started_ = false;

  std::mutex config_mu_;
  nlohmann::json last_config_;  // latest sim.config.result config
};

}  // namespace tollgrid::gateway
