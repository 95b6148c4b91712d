#include "tollgrid/bench/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "tollgrid/framekit/log.hpp"
#include "tollgrid/geo/zone_gen.hpp"
#include "tollgrid/msgbus/broker.hpp"
#include "tollgrid/msgbus/client.hpp"
#include "tollgrid/roadnet/matching.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/services/runner.hpp"
#include "tollgrid/simulator/runner.hpp"

namespace tollgrid::bench {

namespace {

using Json = nlohmann::json;
using SteadyClock = std::chrono::steady_clock;

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("scenario field '") + key + "': " + e.what());
  }
}

// Samples user+system CPU time and resident set size of this process.
class ResourceSampler {
 public:
  explicit ResourceSampler(std::chrono::milliseconds period) : period_(period) {
    thread_ = std::thread([this] { loop(); });
  }
  ~ResourceSampler() { stop(); }

  void stop() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
  }

  void write_csv(std::ostream& out) const {
    out << "t_ms,pid,cpu_ms,rss_kb\n";
    for (const auto& r : rows_) out << r << '\n';
  }

 private:
  void loop() {
    const auto start = SteadyClock::now();
    const long ticks = sysconf(_SC_CLK_TCK);
    while (!stop_) {
      auto t_ms = std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - start);
      long cpu_ms = -1, rss_kb = -1;
      std::ifstream stat("/proc/self/stat");
      std::string text((std::istreambuf_iterator<char>(stat)), {});
      // Fields after the parenthesised command name; utime and stime are
      // fields 14 and 15 counting from 1.
      if (auto p = text.rfind(')'); p != std::string::npos) {
        std::istringstream in(text.substr(p + 2));
        std::string field;
        long utime = 0, stime = 0;
        for (int i = 3; i <= 15 && in >> field; ++i) {
          if (i == 14) utime = std::stol(field);
          if (i == 15) stime = std::stol(field);
        }
        cpu_ms = (utime + stime) * 1000 / ticks;
      }
      std::ifstream status("/proc/self/status");
      for (std::string line; std::getline(status, line);) {
        if (line.rfind("VmRSS:", 0) == 0) rss_kb = std::stol(line.substr(6));
      }
      std::ostringstream row;
      row << t_ms.count() << ',' << getpid() << ',' << cpu_ms << ',' << rss_kb;
      rows_.push_back(row.str());
      for (auto waited = std::chrono::milliseconds(0); waited < period_ && !stop_;
           waited += std::chrono::milliseconds(20)) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    }
  }

  std::chrono::milliseconds period_;
  std::atomic<bool> stop_{false};
  std::vector<std::string> rows_;
  std::thread thread_;
};

struct Collected {
  std::mutex mu;
  std::vector<services::RouteMsg> routes;
  std::size_t segments = 0;
  std::vector<services::TollMsg> tolls;
  std::vector<double> deviation_m;
  std::size_t decode_errors = 0;
};

void evaluate(BenchResult& r, const std::vector<services::RouteMsg>& routes,
              const std::vector<services::TollMsg>& tolls) {
  bool monotonic = true;
  std::map<std::string, const services::TollMsg*> last;
  for (const auto& t : tolls) {
    auto it = last.find(t.vehicle_id);
    std::int64_t prev_cum = 0;
    double prev_dist = 0.0;
    if (it != last.end()) {
      prev_cum = it->second->cumulative_micro_eur;
      prev_dist = it->second->distance_m_total;
    }
    if (t.increment_micro_eur < 0 || t.cumulative_micro_eur != prev_cum + t.increment_micro_eur ||
        t.distance_m_total < prev_dist) {
      monotonic = false;
    }
    last[t.vehicle_id] = &t;
  }
  for (const auto& [vid, msg] : last) {
    r.final_cumulative_micro_eur[vid] = msg->cumulative_micro_eur;
    r.tolled_distance_m += msg->distance_m_total;
  }
  for (const auto& route : routes) r.route_length_m += geo::polyline_length_m(route.polyline);

  if (r.route_length_m > 0.0) {
    r.conservation_rel_error = std::fabs(r.tolled_distance_m - r.route_length_m) / r.route_length_m;
  } else {
    r.conservation_rel_error = r.tolled_distance_m == 0.0 ? 0.0 : 1.0;
  }

  bool complete = true;
  for (const auto& t : tolls) complete = complete && t.trace.complete();

  r.checks["monotonic_tolls"] = monotonic;
  r.checks["conservation"] = r.conservation_rel_error <= 1e-6;
  r.checks["completeness"] = complete;
  r.checks["counts"] = r.tolls == r.expected_tolls && r.routes == r.tolls && r.segments == r.tolls;
}

}  // namespace

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw DataError("scenario must be a JSON object");
  Scenario s;
  read_opt(j, "label", s.label);
  read_opt(j, "vehicles", s.vehicles);
  read_opt(j, "interval_ms", s.interval_ms);
  read_opt(j, "noise_m", s.noise_m);
  read_opt(j, "seed", s.seed);
  read_opt(j, "skip", s.skip);
  read_opt(j, "max_messages", s.max_messages);
  read_opt(j, "max_seconds", s.max_seconds);
  read_opt(j, "network", s.network_path);
  read_opt(j, "zones", s.zones_path);
  read_opt(j, "rates", s.rates_path);
  read_opt(j, "zone_count", s.zone_count);
  read_opt(j, "speed_mps", s.speed_mps);
  read_opt(j, "resources", s.resources);
  if (s.vehicles < 1) throw DataError("scenario vehicles must be >= 1");
  if (s.interval_ms < 1) throw DataError("scenario interval_ms must be >= 1");
  if (s.noise_m < 0) throw DataError("scenario noise_m must be >= 0");
  if (s.max_seconds < 0) throw DataError("scenario max_seconds must be >= 0");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open scenario " + path);
  try {
    auto sc = parse_scenario(Json::parse(in));
    // Input paths are relative to the scenario file.
    const auto base = std::filesystem::path(path).parent_path();
    for (auto* p : {&sc.network_path, &sc.zones_path, &sc.rates_path}) {
      if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
    }
    return sc;
  } catch (const Json::parse_error& e) {
    throw LoadError("scenario " + path + ": " + e.what());
  }
}

Json to_json(const Scenario& s) {
  Json j = {{"label", s.label},
            {"vehicles", s.vehicles},         {"interval_ms", s.interval_ms},
            {"noise_m", s.noise_m},           {"seed", s.seed},
            {"skip", s.skip},                 {"max_messages", s.max_messages},
            {"max_seconds", s.max_seconds},   {"zone_count", s.zone_count},
            {"speed_mps", s.speed_mps},       {"resources", s.resources}};
  if (!s.network_path.empty()) j["network"] = s.network_path;
  if (!s.zones_path.empty()) j["zones"] = s.zones_path;
  if (!s.rates_path.empty()) j["rates"] = s.rates_path;
  return j;
}

BenchResult run_bench(const Scenario& sc, const std::filesystem::path& out_dir) {
  BenchResult r;
  const auto t0 = SteadyClock::now();
  const auto deadline =
      t0 + std::chrono::duration_cast<SteadyClock::duration>(std::chrono::duration<double>(sc.max_seconds));

  const auto vehicles = static_cast<std::size_t>(sc.vehicles);
  // Each vehicle's first update only opens its window, so tick k >= 2 yields
  // one toll per vehicle.
  const std::size_t ticks = (sc.max_messages + vehicles - 1) / vehicles + 1;
  r.expected_tolls = vehicles * (ticks - 1);

  std::unique_ptr<ResourceSampler> sampler;
  if (sc.resources) sampler = std::make_unique<ResourceSampler>(std::chrono::milliseconds(500));

  Collected got;
  std::unique_ptr<msgbus::Broker> broker;
  std::vector<std::unique_ptr<services::Service>> services;
  std::unique_ptr<simulator::SimRunner> sim;
  std::unique_ptr<msgbus::BusClient> collector;
  std::thread collector_thread;
  std::atomic<bool> collecting{true};
  simulator::SimRunnerCounters sim_counters;
  std::uint64_t broker_dropped = 0;
  std::uint64_t service_errors = 0;
  Json network_json = nullptr;

  if (sc.max_seconds <= 0.0) {
    r.timed_out = true;
  } else {
    try {
      auto net = std::make_shared<const roadnet::RoadNetwork>(
          sc.network_path.empty() ? roadnet::make_grid(roadnet::GridSpec{})
                                  : roadnet::load_network(sc.network_path));
      auto zones = std::make_shared<const std::vector<geo::PollutionZone>>(
          sc.zones_path.empty() ? geo::generate_rect_zones(net->bbox(), sc.zone_count, sc.seed)
                                : geo::load_zones(sc.zones_path));
      services::RateTable rates =
          sc.rates_path.empty() ? services::RateTable{} : services::load_rates(sc.rates_path);

      broker = msgbus::run_broker({"127.0.0.1", 0});
      const auto ep = broker->endpoint();

      collector = std::make_unique<msgbus::BusClient>(ep);
      auto inbox = std::make_shared<msgbus::Inbox>("bench");
      collector->subscribe(msgbus::topics::kRoute, inbox);
      collector->subscribe(msgbus::topics::kSegment, inbox);
      collector->subscribe(msgbus::topics::kToll, inbox);
      collector->subscribe(msgbus::topics::kLocationUpdate, inbox);
      network_json = {{"source", sc.network_path.empty() ? "generated grid" : sc.network_path},
                      {"nodes", net->nodes().size()},
                      {"edges", net->edges().size()}};
      collector_thread = std::thread([&, inbox, net] {
        while (collecting || inbox->size() > 0) {
          auto f = inbox->pop(std::chrono::milliseconds(50));
          if (!f) {
            if (inbox->closed()) break;
            continue;
          }
          std::lock_guard lock(got.mu);
          try {
            if (f->topic == msgbus::topics::kRoute) {
              got.routes.push_back(services::decode_route(f->payload));
            } else if (f->topic == msgbus::topics::kSegment) {
              services::decode_segment(f->payload);
              ++got.segments;
            } else if (f->topic == msgbus::topics::kToll) {
              got.tolls.push_back(services::decode_toll(f->payload));
            } else if (f->topic == msgbus::topics::kLocationUpdate) {
              const auto u = services::decode_location_update(f->payload);
              got.deviation_m.push_back(roadnet::nearest_edge(*net, u.point).deviation_m);
            }
          } catch (const DataError& e) {
            ++got.decode_errors;
            framekit::log(framekit::LogLevel::kWarn, "bench", e.what());
          }
        }
      });

      for (auto kind : {services::ServiceKind::kMapMatcher, services::ServiceKind::kPollutionMatcher,
                        services::ServiceKind::kTollCalculator}) {
        services::ServiceConfig cfg;
        cfg.network = net;
        cfg.zones = zones;
        cfg.rates = rates;
        services.push_back(services::run_service(kind, ep, std::move(cfg)));
      }

      simulator::SimConfig simcfg;
      simcfg.vehicle_count = sc.vehicles;
      simcfg.update_interval_ms = sc.interval_ms;
      simcfg.gps_noise_m = sc.noise_m;
      simcfg.seed = sc.seed;
      simcfg.speed_mps = sc.speed_mps;
      simulator::SimRunnerOptions opts;
      opts.tick_ms = sc.interval_ms;
      opts.max_ticks = static_cast<std::int64_t>(ticks);
      opts.paced = true;
      sim = std::make_unique<simulator::SimRunner>(net, simcfg, ep, opts);
      sim->start();

      for (;;) {
        {
          std::lock_guard lock(got.mu);
          if (got.tolls.size() >= r.expected_tolls) break;
        }
        if (SteadyClock::now() >= deadline) {
          r.timed_out = true;
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      // Let late duplicates or stragglers surface in the counts.
      if (!r.timed_out) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    } catch (const Error& e) {
      framekit::log(framekit::LogLevel::kError, "bench", e.what());
      r.exit_code = kExitStartup;
    }
  }

  if (sim) {
    sim->stop();
    sim_counters = sim->counters();
  }
  for (auto& s : services) {
    service_errors += s->counters().errors;
    s->stop();
  }
  collecting = false;
  if (collector) collector->close();
  if (collector_thread.joinable()) collector_thread.join();
  if (broker) {
    for (const auto& [k, v] : broker->stats().dropped) broker_dropped += v;
    broker->stop();
  }
  if (sampler) sampler->stop();

  r.elapsed_s = std::chrono::duration<double>(SteadyClock::now() - t0).count();
  r.locations_published = sim_counters.published;
  r.routes = got.routes.size();
  r.segments = got.segments;
  r.tolls = got.tolls.size();
  r.collected = collect(got.tolls, WarmupPolicy{sc.skip});
  evaluate(r, got.routes, got.tolls);

  Json j;
  j["status"] = r.exit_code == kExitStartup ? "startup_failed" : r.timed_out ? "timeout" : "complete";
  j["config"] = to_json(sc);
  // The skip counts messages, not per-vehicle iterations.
  j["config"]["skip_iterations"] = static_cast<double>(sc.skip) / sc.vehicles;
  j["network"] = network_json;
  j["elapsed_s"] = r.elapsed_s;
  j["counts"] = {{"location_updates", r.locations_published},
                 {"routes", r.routes},
                 {"segments", r.segments},
                 {"tolls", r.tolls},
                 {"expected_tolls", r.expected_tolls},
                 {"samples", r.collected.samples.size()},
                 {"warmup_skipped", r.collected.skipped}};
  const std::map<std::string, std::uint64_t> drops = {
      {"incomplete_trace", r.collected.dropped_incomplete},
      {"broker_dropped", broker_dropped},
      {"service_errors", service_errors},
      {"decode_errors", got.decode_errors},
      {"missing_tolls", r.expected_tolls > r.tolls ? r.expected_tolls - r.tolls : 0}};
  if (!r.collected.samples.empty()) {
    r.report = report(r.collected.samples);
    r.report->drops = drops;
    j["latency"] = to_json(*r.report);
  } else {
    j["latency"] = nullptr;
  }
  j["drops"] = drops;
  if (!got.deviation_m.empty()) {
    auto d = got.deviation_m;
    std::sort(d.begin(), d.end());
    r.deviation_count = d.size();
    r.deviation_mean_m = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    r.deviation_p95_m = percentile(std::span<const double>(d), 95);
    r.deviation_max_m = d.back();
  }
  j["gps_deviation_m"] = {{"count", r.deviation_count},
                          {"mean", r.deviation_mean_m},
                          {"p95", r.deviation_p95_m},
                          {"max", r.deviation_max_m}};
  j["checks"] = r.checks;
  j["conservation_rel_error"] = r.conservation_rel_error;
  j["tolled_distance_m"] = r.tolled_distance_m;
  j["route_length_m"] = r.route_length_m;
  Json finals = Json::object();
  for (const auto& [vid, cum] : r.final_cumulative_micro_eur) finals[vid] = cum;
  j["final_cumulative_micro_eur"] = finals;

  if (r.exit_code == kExitOk) {
    if (r.timed_out) {
      r.exit_code = kExitTimeout;
    } else {
      for (const auto& [name, ok] : r.checks) {
        if (!ok) r.exit_code = kExitCheckFailed;
      }
    }
  }
  j["exit_code"] = r.exit_code;
  r.report_json = j;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "report.json") << j.dump(2) << '\n';
    std::ofstream csv(out_dir / "latency.csv");
    write_csv(csv, r.collected.samples);
    if (sampler) {
      std::ofstream res(out_dir / "resources.csv");
      sampler->write_csv(res);
    }
  }
  return r;
}

}  // namespace tollgrid::bench
