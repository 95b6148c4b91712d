#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>

#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/msgbus/client.hpp"
#include "tollgrid/simulator/simulator.hpp"

namespace tollgrid::simulator {

struct SimRunnerOptions {
  // Simulated (and real) time per tick; 0 means min(update_interval_ms, 100).
  std::int64_t tick_ms = 0;
  // Stop after this many ticks; 0 runs until stop().
  std::int64_t max_ticks = 0;
  // Sleep between ticks to keep real time; false runs as fast as possible.
  bool paced = true;
  std::string instance_id;
  std::int64_t heartbeat_interval_ms = 2'000;
  std::int64_t registry_ttl_ms = 10'000;
  framekit::RetryPolicy connect_retry{6, 50.0, 2.0, 2'000.0, 0.1};
};

struct SimRunnerCounters {
  std::uint64_t ticks = 0;
  std::uint64_t published = 0;
  std::uint64_t publish_errors = 0;
  std::uint64_t configs_applied = 0;
  std::uint64_t configs_rejected = 0;
  std::uint64_t reconnects = 0;
};

// Broker-connected tick loop: applies "sim.config" messages between ticks,
// publishes each tick's updates on "location.update", and answers every
// config message on "sim.config.result" with {accepted, errors, config}.
class SimRunner {
 public:
  SimRunner(std::shared_ptr<const roadnet::RoadNetwork> net, SimConfig config,
            msgbus::Endpoint broker, SimRunnerOptions options = {},
            std::shared_ptr<framekit::Clock> clock = framekit::system_clock());
  ~SimRunner();

  // Throws StartupError when the broker is unreachable.
  void start();
  void stop();
  // Blocks until max_ticks have run (or stop()).
  void wait();

  SimRunnerCounters counters() const;
  SimConfig config() const;
  std::size_t vehicle_count() const;

 private:
  void loop();
  void apply_pending();
  bool ensure_connected();
  std::int64_t tick_ms() const;

  Simulator sim_;
  msgbus::Endpoint broker_;
  SimRunnerOptions options_;
  std::shared_ptr<framekit::Clock> clock_;
  std::unique_ptr<msgbus::BusClient> client_;
  std::shared_ptr<msgbus::Inbox> config_inbox_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  bool started_ = false;
  int reconnect_attempt_ = 0;
  std::int64_t next_reconnect_ms_ = 0;
  mutable std::mutex mu_;  // guards sim_ and counters_
  SimRunnerCounters counters_;
};

}  // namespace tollgrid::simulator
