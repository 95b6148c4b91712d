#include "tollgrid/simulator/runner.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/log.hpp"
#include "tollgrid/services/registry_wire.hpp"

namespace tollgrid::simulator {

namespace topics = msgbus::topics;
using framekit::LogLevel;

SimRunner::SimRunner(std::shared_ptr<const roadnet::RoadNetwork> net, SimConfig config,
                     msgbus::Endpoint broker, SimRunnerOptions options,
                     std::shared_ptr<framekit::Clock> clock)
    : sim_(std::move(net), config, clock),
      broker_(std::move(broker)),
      options_(std::move(options)),
      clock_(std::move(clock)) {
  if (options_.instance_id.empty()) options_.instance_id = services::make_instance_id("simulator");
}

SimRunner::~SimRunner() { stop(); }

void SimRunner::start() {
  if (started_) return;
  try {
    client_ = msgbus::connect_with_retry(broker_, options_.connect_retry, *clock_);
  } catch (const framekit::RetryExhausted& e) {
    throw StartupError("simulator: broker " + broker_.to_string() + " unreachable: " + e.what());
  }
  config_inbox_ = client_->subscribe(topics::kSimConfig);
  started_ = true;
  thread_ = std::thread([this] { loop(); });
}

void SimRunner::stop() {
  stopping_ = true;
  wait();
  client_.reset();
}

void SimRunner::wait() {
  if (thread_.joinable()) thread_.join();
}

SimRunnerCounters SimRunner::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

SimConfig SimRunner::config() const {
  std::lock_guard lock(mu_);
  return sim_.config();
}

std::size_t SimRunner::vehicle_count() const {
  std::lock_guard lock(mu_);
  return sim_.vehicles().size();
}

bool SimRunner::ensure_connected() {
  if (client_ && client_->connected()) return true;
  const auto now = clock_->now_ms();
  if (now < next_reconnect_ms_) return false;
  if (reconnect_attempt_ == 0) {
    framekit::log(LogLevel::kWarn, "simulator", "broker connection lost, reconnecting");
  }
  ++reconnect_attempt_;
  try {
    auto c = std::make_unique<msgbus::BusClient>(broker_);
    auto inbox = c->subscribe(topics::kSimConfig);
    client_ = std::move(c);
    config_inbox_ = std::move(inbox);
    reconnect_attempt_ = 0;
    std::lock_guard lock(mu_);
    ++counters_.reconnects;
    return true;
  } catch (const Error&) {
    next_reconnect_ms_ = now + static_cast<std::int64_t>(
                                   options_.connect_retry.nominal_delay_ms(reconnect_attempt_ + 1));
    return false;
  }
}

std::int64_t SimRunner::tick_ms() const {
  if (options_.tick_ms > 0) return options_.tick_ms;
  return std::min<std::int64_t>(sim_.config().update_interval_ms, 100);
}

void SimRunner::apply_pending() {
  while (auto frame = config_inbox_->try_pop()) {
    nlohmann::json result;
    SimConfigPatch patch;
    std::vector<FieldError> errors;
    try {
      errors = parse_patch(nlohmann::json::parse(frame->payload), patch);
    } catch (const nlohmann::json::exception& e) {
      errors.push_back({"", std::string("malformed JSON: ") + e.what()});
    }
    std::lock_guard lock(mu_);
    if (errors.empty()) errors = validate(patch.apply_to(sim_.config()));
    if (errors.empty()) {
      sim_.apply_config(patch);
      ++counters_.configs_applied;
    } else {
      ++counters_.configs_rejected;
    }
    auto errs = nlohmann::json::array();
    for (const auto& e : errors) errs.push_back({{"field", e.field}, {"message", e.message}});
    result = {{"accepted", errors.empty()}, {"errors", errs}, {"config", to_json(sim_.config())}};
    try {
      client_->publish(topics::kSimConfigResult, result.dump());
    } catch (const Error&) {
    }
  }
}

void SimRunner::loop() {
  std::int64_t next_tick_us = clock_->now_us();
  std::int64_t next_heartbeat_ms = 0;
  std::int64_t ticks = 0;
  while (!stopping_ && (options_.max_ticks == 0 || ticks < options_.max_ticks)) {
    const bool connected = ensure_connected();
    if (connected && clock_->now_ms() >= next_heartbeat_ms) {
      framekit::ServiceRecord rec{"simulator", options_.instance_id, "", 0, 0,
                                  options_.registry_ttl_ms};
      try {
        client_->publish(topics::kRegistryHeartbeat, services::encode_heartbeat(rec));
      } catch (const Error&) {
      }
      next_heartbeat_ms = clock_->now_ms() + options_.heartbeat_interval_ms;
    }
    if (connected) apply_pending();
    std::vector<services::LocationUpdate> updates;
    std::int64_t dt;
    {
      std::lock_guard lock(mu_);
      dt = tick_ms();
      updates = sim_.step(dt);
    }
    std::uint64_t ok = 0, failed = 0;
    for (const auto& u : updates) {
      // Updates produced while the broker is away are lost, as with any
      // at-most-once publisher.
      if (!connected) {
        ++failed;
        continue;
      }
      try {
        client_->publish(topics::kLocationUpdate, services::encode(u));
        ++ok;
      } catch (const Error& e) {
        ++failed;
        framekit::log(LogLevel::kWarn, "simulator", e.what());
      }
    }
    {
      std::lock_guard lock(mu_);
      counters_.published += ok;
      counters_.publish_errors += failed;
      ++counters_.ticks;
    }
    ++ticks;
    if (options_.paced) {
      next_tick_us += dt * 1000;
      const std::int64_t wait_us = next_tick_us - clock_->now_us();
      if (wait_us > 0) clock_->sleep_for_us(wait_us);
    }
  }
}

}  // namespace tollgrid::simulator
