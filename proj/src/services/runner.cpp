#include "tollgrid/services/runner.hpp"

#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/log.hpp"
#include "tollgrid/framekit/timeout.hpp"
#include "tollgrid/services/registry_wire.hpp"

namespace tollgrid::services {

using framekit::LogLevel;
namespace topics = msgbus::topics;

std::string_view service_name(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::kMapMatcher: return "mapmatcher";
    case ServiceKind::kPollutionMatcher: return "pollutionmatcher";
    case ServiceKind::kTollCalculator: return "tollcalculator";
  }
  return "?";
}

std::string_view input_topic(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::kMapMatcher: return topics::kLocationUpdate;
    case ServiceKind::kPollutionMatcher: return topics::kRoute;
    case ServiceKind::kTollCalculator: return topics::kSegment;
  }
  return {};
}

std::string_view output_topic(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::kMapMatcher: return topics::kRoute;
    case ServiceKind::kPollutionMatcher: return topics::kSegment;
    case ServiceKind::kTollCalculator: return topics::kToll;
  }
  return {};
}

std::optional<ServiceKind> parse_service_kind(std::string_view text) {
  if (text == "matcher" || text == "mapmatcher") return ServiceKind::kMapMatcher;
  if (text == "pollution" || text == "pollutionmatcher") return ServiceKind::kPollutionMatcher;
  if (text == "toll" || text == "tollcalculator") return ServiceKind::kTollCalculator;
  return std::nullopt;
}

Service::Service(ServiceKind kind, msgbus::Endpoint broker, ServiceConfig config)
    : kind_(kind),
      broker_(std::move(broker)),
      config_(std::move(config)),
      breaker_(config_.breaker, config_.clock) {
  if (config_.instance_id.empty()) config_.instance_id = make_instance_id(std::string(service_name(kind)));
  switch (kind_) {
    case ServiceKind::kMapMatcher:
      if (!config_.network) throw StartupError("map matcher needs a road network");
      matcher_.emplace(*config_.network);
      break;
    case ServiceKind::kPollutionMatcher:
      if (!config_.zones) throw StartupError("pollution matcher needs a zone list");
      if (!config_.index) config_.index = std::make_shared<geo::ZoneIndex>(*config_.zones);
      break;
    case ServiceKind::kTollCalculator:
      break;
  }
}

Service::~Service() { stop(); }

void Service::start() {
  if (started_) return;
  try {
    client_ = msgbus::connect_with_retry(broker_, config_.connect_retry, *config_.clock);
  } catch (const framekit::RetryExhausted& e) {
    throw StartupError(std::string(service_name(kind_)) + ": broker " + broker_.to_string() +
                       " unreachable: " + e.what());
  }
  inbox_ = client_->subscribe(input_topic(kind_));
  connected_ = true;
  if (config_.health_port >= 0) {
    health_ = std::make_unique<HealthServer>(config_.health_host, config_.health_port,
                                             [this] { return health(); });
    health_->start();
  }
  publish_heartbeat();
  started_ = true;
  thread_ = std::thread([this] { loop(); });
}

void Service::stop() {
  if (!started_ || stopping_.exchange(true)) return;
  if (thread_.joinable()) thread_.join();
  if (health_) health_->stop();
  client_.reset();
  connected_ = false;
}

ServiceCounters Service::counters() const {
  return {received_.load(), processed_.load(), errors_.load(), reconnects_.load()};
}

bool Service::broker_connected() const { return connected_.load(); }

int Service::health_port() const { return health_ ? health_->port() : -1; }

nlohmann::json Service::health() const {
  const bool up = broker_connected();
  const auto b = breaker_.snapshot();
  return {{"status", up ? "ok" : "degraded"},
          {"service", service_name(kind_)},
          {"instance_id", config_.instance_id},
          {"processed", processed_.load()},
          {"received", received_.load()},
          {"errors", errors_.load()},
          {"broker_connected", up},
          {"breaker", framekit::to_string(b.state)}};
}

void Service::publish_heartbeat() {
  framekit::ServiceRecord rec;
  rec.name = std::string(service_name(kind_));
  rec.instance_id = config_.instance_id;
  rec.address = health_ ? config_.health_host + ":" + std::to_string(health_->port()) : "";
  rec.ttl_ms = config_.registry_ttl_ms;
  try {
    client_->publish(topics::kRegistryHeartbeat, encode_heartbeat(rec));
  } catch (const Error& e) {
    framekit::log(LogLevel::kWarn, service_name(kind_), std::string("heartbeat: ") + e.what());
  }
  next_heartbeat_ms_ = config_.clock->now_ms() + config_.heartbeat_interval_ms;
}

bool Service::connect_once() {
  try {
    auto client = std::make_unique<msgbus::BusClient>(broker_);
    inbox_ = client->subscribe(input_topic(kind_));
    client_ = std::move(client);
    connected_ = true;
    ++reconnects_;
    publish_heartbeat();
    return true;
  } catch (const Error&) {
    return false;
  }
}

void Service::loop() {
  int attempt = 1;
  while (!stopping_) {
    if (!client_ || !client_->connected()) {
      connected_ = false;
      if (connect_once()) {
        attempt = 1;
        continue;
      }
      // Wait out the back-off in small steps so stop() stays responsive.
      auto wait_ms = static_cast<std::int64_t>(config_.connect_retry.nominal_delay_ms(++attempt));
      for (std::int64_t waited = 0; waited < wait_ms && !stopping_; waited += 20) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
      continue;
    }
    if (config_.clock->now_ms() >= next_heartbeat_ms_) publish_heartbeat();
    auto frame = inbox_->pop(std::chrono::milliseconds(50));
    if (frame) handle(*frame);
  }
}

void Service::handle(const msgbus::Frame& frame) {
  ++received_;
  const auto& clock = *config_.clock;
  std::string trace_id;
  try {
    std::optional<std::string> out;
    switch (kind_) {
      case ServiceKind::kMapMatcher: {
        const auto update = decode_location_update(frame.payload);
        trace_id = update.trace.trace_id;
        if (auto route = matcher_->on_update(update, clock)) out = encode(*route);
        break;
      }
      case ServiceKind::kPollutionMatcher: {
        auto route = std::make_shared<const RouteMsg>(decode_route(frame.payload));
        trace_id = route->trace.trace_id;
        auto zones = config_.zones;
        auto index = config_.index;
        auto clk = config_.clock;
        const auto limit = config_.zone_lookup_timeout_ms;
        const SegmentMsg seg = breaker_.call([&] {
          return framekit::with_timeout(
              [route, zones, index, clk] {
                return pollution_matcher_step(*route, *zones, *index, *clk);
              },
              limit);
        });
        out = encode(seg);
        break;
      }
      case ServiceKind::kTollCalculator: {
        const auto seg = decode_segment(frame.payload);
        trace_id = seg.trace.trace_id;
        out = encode(toll_step(tolls_, seg, config_.rates, clock));
        break;
      }
    }
    if (out) {
      client_->publish(output_topic(kind_), *out);
      ++processed_;
    }
  } catch (const std::exception& e) {
    ++errors_;
    framekit::log(LogLevel::kWarn, service_name(kind_),
                  "dropped message" + (trace_id.empty() ? "" : " trace " + trace_id) + ": " +
                      e.what());
  }
}

std::unique_ptr<Service> run_service(ServiceKind kind, const msgbus::Endpoint& broker,
                                     ServiceConfig config) {
  auto service = std::make_unique<Service>(kind, broker, std::move(config));
  service->start();
  return service;
}

}  // namespace tollgrid::services
