#include "tollgrid/gateway/gateway.hpp"

#include <httplib.h>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/log.hpp"
#include "tollgrid/msgbus/frame.hpp"
#include "tollgrid/services/registry_wire.hpp"
#include "tollgrid/simulator/sim_config.hpp"

namespace tollgrid::gateway {

namespace topics = msgbus::topics;
using Json = nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Json record_json(const framekit::ServiceRecord& r) {
  return {{"name", r.name},
          {"instance_id", r.instance_id},
          {"address", r.address},
          {"registered_at_ms", r.registered_at_ms},
          {"last_heartbeat_ms", r.last_heartbeat_ms},
          {"ttl_ms", r.ttl_ms}};
}

}  // namespace

struct Gateway::Http {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)),
      state_(options_.route_history),
      registry_(options_.clock),
      hub_(options_.stream_queue),
      http_(std::make_unique<Http>()),
      last_config_(nullptr) {}

Gateway::~Gateway() { stop(); }

int Gateway::http_port() const { return http_->port; }

void Gateway::start() {
  if (started_) return;
  auto& srv = http_->server;
  const auto threads = options_.http_threads;
  srv.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };

  srv.Get("/vehicles", [this](const httplib::Request&, httplib::Response& res) {
    auto list = Json::array();
    for (const auto& v : state_.vehicles()) list.push_back(to_json(v, false));
    reply(res, 200, {{"stale", !connected_}, {"vehicles", list}});
  });
  srv.Get(R"(/vehicles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto v = state_.vehicle(req.matches[1]);
    if (!v) return reply(res, 404, {{"error", "unknown vehicle"}, {"vehicle_id", req.matches[1]}});
    auto j = to_json(*v, true);
    j["stale"] = !connected_;
    reply(res, 200, j);
  });
  srv.Get("/tolls", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"stale", !connected_}, {"tolls", toll_table(state_.vehicles())}});
  });
  srv.Get("/registry", [this](const httplib::Request&, httplib::Response& res) {
    auto list = Json::array();
    for (const auto& r : registry_.all()) list.push_back(record_json(r));
    reply(res, 200, {{"services", list}});
  });
  srv.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    const bool ok = connected_;
    const auto last = last_event_ms_.load();
    reply(res, ok ? 200 : 503,
          {{"status", ok ? "ok" : "degraded"},
           {"broker_connected", ok},
           {"stale", !ok},
           {"vehicles", state_.size()},
           {"stream_clients", hub_.clients()},
           {"last_event_age_ms", last == 0 ? Json(nullptr) : Json(now_ms() - last)},
           {"reconnects", reconnects_.load()}});
  });
  srv.Post("/sim/config", [this](const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      return reply(res, 400, {{"error", "malformed JSON"}, {"detail", e.what()}});
    }
    if (!body.is_object()) return reply(res, 400, {{"error", "body must be a JSON object"}});
    simulator::SimConfigPatch patch;
    auto errors = simulator::parse_patch(body, patch);
    if (!errors.empty()) {
      auto fields = Json::array();
      for (const auto& e : errors) fields.push_back({{"field", e.field}, {"message", e.message}});
      return reply(res, 422, {{"error", "validation failed"}, {"fields", fields}});
    }
    std::shared_ptr<msgbus::BusClient> client;
    {
      std::lock_guard lock(client_mu_);
      client = client_;
    }
    if (!client || !client->connected()) return reply(res, 503, {{"error", "broker unavailable"}});
    try {
      client->publish(topics::kSimConfig, simulator::to_json(patch).dump());
    } catch (const Error& e) {
      return reply(res, 503, {{"error", "broker unavailable"}, {"detail", e.what()}});
    }
    reply(res, 200, {{"accepted", true}, {"config", simulator::to_json(patch)}});
  });
  srv.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    auto client = hub_.attach();
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [this, client](std::size_t, httplib::DataSink& sink) {
          std::string line;
          switch (hub_.next(client, line, std::chrono::milliseconds(250))) {
            case EventHub::Wait::kEvent:
              line.push_back('\n');
              return sink.write(line.data(), line.size());
            case EventHub::Wait::kTimeout:
              return !sink.is_writable || sink.is_writable();
            case EventHub::Wait::kCutOff:
              return false;
            case EventHub::Wait::kClosed:
              sink.done();
              return true;
          }
          return false;
        },
        [this, client](bool) { hub_.detach(client); });
  });
  if (!options_.ui_dir.empty() && !srv.set_mount_point("/ui", options_.ui_dir)) {
    throw StartupError("gateway: cannot serve " + options_.ui_dir);
  }

  const auto& h = options_.http;
  if (h.port == 0) {
    http_->port = srv.bind_to_any_port(h.host);
    if (http_->port <= 0) throw StartupError("gateway: cannot bind " + h.host);
  } else {
    if (!srv.bind_to_port(h.host, h.port)) throw StartupError("gateway: cannot bind " + h.to_string());
    http_->port = h.port;
  }

  try {
    auto c = msgbus::connect_with_retry(options_.broker, options_.connect_retry, *options_.clock);
    std::lock_guard lock(client_mu_);
    client_ = std::move(c);
  } catch (const Error& e) {
    srv.stop();
    throw StartupError("gateway: broker " + options_.broker.to_string() + " unreachable: " + e.what());
  }
  if (!connect_once()) {
    srv.stop();
    throw StartupError("gateway: cannot subscribe on " + options_.broker.to_string());
  }

  http_->thread = std::thread([this] { http_->server.listen_after_bind(); });
  consumer_ = std::thread([this] { consume_loop(); });
  started_ = true;
}

// Subscribes the current client; false when it is unusable.
bool Gateway::connect_once() {
  std::shared_ptr<msgbus::BusClient> client;
  {
    std::lock_guard lock(client_mu_);
    client = client_;
  }
  if (!client) return false;
  try {
    auto inbox = std::make_shared<msgbus::Inbox>("gateway");
    for (auto t : {topics::kRoute, topics::kToll, topics::kSimConfigResult, topics::kRegistryHeartbeat}) {
      client->subscribe(t, inbox);
    }
    inbox_ = inbox;
    connected_ = true;
    return true;
  } catch (const Error& e) {
    framekit::log(framekit::LogLevel::kWarn, "gateway", e.what());
    return false;
  }
}

void Gateway::consume_loop() {
  int attempt = 1;
  while (!stopping_) {
    if (connected_) {
      auto frame = inbox_->pop(std::chrono::milliseconds(100));
      if (frame) {
        handle(*frame);
        continue;
      }
      if (!inbox_->closed()) continue;
      connected_ = false;
      framekit::log(framekit::LogLevel::kWarn, "gateway", "broker connection lost");
      attempt = 1;
    }
    // Reconnect with exponential back-off until stopped.
    ++attempt;
    auto delay = static_cast<std::int64_t>(options_.connect_retry.nominal_delay_ms(attempt));
    for (std::int64_t waited = 0; waited < delay && !stopping_; waited += 20) {
      options_.clock->sleep_for_us(20'000);
    }
    if (stopping_) break;
    try {
      auto c = std::make_shared<msgbus::BusClient>(options_.broker);
      {
        std::lock_guard lock(client_mu_);
        client_ = c;
      }
      if (connect_once()) {
        ++reconnects_;
        framekit::log(framekit::LogLevel::kInfo, "gateway", "broker connection restored");
      }
    } catch (const Error&) {
    }
  }
}

void Gateway::handle(const msgbus::Frame& frame) {
  const auto now = now_ms();
  last_event_ms_ = now;
  try {
    if (frame.topic == topics::kRegistryHeartbeat) {
      services::apply_heartbeat(registry_, services::decode_heartbeat(frame.payload));
      return;
    }
    std::string type;
    if (frame.topic == topics::kRoute) {
      state_.on_route(services::decode_route(frame.payload), now);
      type = "route";
    } else if (frame.topic == topics::kToll) {
      state_.on_toll(services::decode_toll(frame.payload), now);
      type = "toll";
    } else if (frame.topic == topics::kSimConfigResult) {
      auto j = Json::parse(frame.payload);
      std::lock_guard lock(config_mu_);
      last_config_ = j.value("config", Json(nullptr));
      type = "config";
    } else {
      return;
    }
    Json event = {{"type", type}, {"payload", Json::parse(frame.payload)}};
    hub_.publish(event.dump());
  } catch (const std::exception& e) {
    framekit::log(framekit::LogLevel::kWarn, "gateway",
                  "dropping malformed " + frame.topic + ": " + e.what());
  }
}

void Gateway::stop() {
  if (!started_) return;
  started_ = false;
  stopping_ = true;
  hub_.close();
  if (consumer_.joinable()) consumer_.join();
  http_->server.stop();
  if (http_->thread.joinable()) http_->thread.join();
  std::lock_guard lock(client_mu_);
  if (client_) client_->close();
}

}  // namespace tollgrid::gateway
