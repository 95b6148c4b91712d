#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tollgrid/framekit/breaker.hpp"
#include "tollgrid/framekit/clock.hpp"
#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/geo/zone.hpp"
#include "tollgrid/geo/zone_index.hpp"
#include "tollgrid/msgbus/client.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/services/health.hpp"
#include "tollgrid/services/rates.hpp"
#include "tollgrid/services/steps.hpp"

namespace tollgrid::services {

enum class ServiceKind { kMapMatcher, kPollutionMatcher, kTollCalculator };

std::string_view service_name(ServiceKind kind);
std::string_view input_topic(ServiceKind kind);
std::string_view output_topic(ServiceKind kind);
// Accepts "matcher", "pollution", "toll".
std::optional<ServiceKind> parse_service_kind(std::string_view text);

struct ServiceConfig {
  std::shared_ptr<const roadnet::RoadNetwork> network;           // map matcher
  std::shared_ptr<const std::vector<geo::PollutionZone>> zones;  // pollution matcher
  std::shared_ptr<const geo::ZoneIndex> index;                   // built from zones if null
  RateTable rates;                                               // toll calculator

  int health_port = -1;  // < 0 disables the health endpoint, 0 is ephemeral
  std::string health_host = "127.0.0.1";
  std::string instance_id;  // generated when empty

  // Wraps the zone lookup (the pollution "database" boundary).
  framekit::BreakerConfig breaker;
  std::int64_t zone_lookup_timeout_ms = 2'000;

  std::int64_t heartbeat_interval_ms = 2'000;
  std::int64_t registry_ttl_ms = 10'000;
  framekit::RetryPolicy connect_retry{6, 50.0, 2.0, 2'000.0, 0.1};
  std::shared_ptr<framekit::Clock> clock = framekit::system_clock();
};

struct ServiceCounters {
  std::uint64_t received = 0;
  std::uint64_t processed = 0;  // produced an output message
  std::uint64_t errors = 0;
  std::uint64_t reconnects = 0;
};

// One functional microservice: consumes its input topic strictly in arrival
// order on a single thread and publishes to its output topic.
class Service {
 public:
  Service(ServiceKind kind, msgbus::Endpoint broker, ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Connects (with retry), subscribes, starts the health endpoint and the
  // loop. Throws StartupError when the broker stays unreachable.
  void start();
  void stop();

  ServiceKind kind() const { return kind_; }
  const std::string& instance_id() const { return config_.instance_id; }
  ServiceCounters counters() const;
  bool broker_connected() const;
  // {"status", "service", "instance_id", "processed", "errors", ...}
  nlohmann::json health() const;
  int health_port() const;
  framekit::BreakerSnapshot breaker() const { return breaker_.snapshot(); }

 private:
  void loop();
  bool connect_once();
  void handle(const msgbus::Frame& frame);
  void publish_heartbeat();

  ServiceKind kind_;
  msgbus::Endpoint broker_;
  ServiceConfig config_;
  framekit::CircuitBreaker breaker_;
  std::optional<MapMatcher> matcher_;
  TollState tolls_;

  std::unique_ptr<msgbus::BusClient> client_;
  std::shared_ptr<msgbus::Inbox> inbox_;
  std::unique_ptr<HealthServer> health_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  bool started_ = false;
  std::int64_t next_heartbeat_ms_ = 0;

  std::atomic<std::uint64_t> received_{0}, processed_{0}, errors_{0}, reconnects_{0};
  std::atomic<bool> connected_{false};
};

std::unique_ptr<Service> run_service(ServiceKind kind, const msgbus::Endpoint& broker,
                                     ServiceConfig config);

}  // namespace tollgrid::services
