#include "tollgrid/simulator/simulator.hpp"

#include <cmath>
#include <cstdio>

#include "tollgrid/error.hpp"

namespace tollgrid::simulator {

namespace {

constexpr double kMetersPerDegree = geo::kEarthRadiusM * geo::kPi / 180.0;

void require_valid(const SimConfig& cfg) {
  const auto errors = validate(cfg);
  if (!errors.empty()) {
    throw ContractError("sim config: " + errors.front().field + " " + errors.front().message);
  }
}

}  // namespace

std::string vehicle_id_for(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "v%03d", index);
  return buf;
}

Simulator::Simulator(std::shared_ptr<const roadnet::RoadNetwork> net, SimConfig config,
                     std::shared_ptr<framekit::Clock> clock)
    : net_(std::move(net)),
      config_(config),
      clock_(std::move(clock)),
      move_rng_(config.seed),
      noise_rng_(config.seed ^ 0x9e3779b97f4a7c15ULL),
      trace_rng_(config.seed ^ 0xc2b2ae3d27d4eb4fULL) {
  if (!net_ || net_->empty()) throw ContractError("simulator needs a non-empty road network");
  require_valid(config_);
  while (static_cast<int>(vehicles_.size()) < config_.vehicle_count) spawn();
}

void Simulator::spawn() {
  const auto& nodes = net_->nodes();
  const auto& edges = net_->edges();
  VehicleState v;
  const int index = next_index_++;
  v.vehicle_id = vehicle_id_for(index);
  v.speed_mps = config_.speed_mps;
  for (;;) {
    std::uniform_int_distribution<std::size_t> pick_node(0, nodes.size() - 1);
    const std::size_t n = pick_node(move_rng_);
    const auto inc = net_->incident(n);
    if (inc.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick_edge(0, inc.size() - 1);
    v.edge_idx = inc[pick_edge(move_rng_)];
    v.forward = edges[v.edge_idx].from == nodes[n].id;
    v.t = v.forward ? 0.0 : 1.0;
    break;
  }
  vehicles_.emplace(index, std::move(v));
}

void Simulator::advance(VehicleState& v, double meters) {
  const auto& edges = net_->edges();
  while (meters > 0.0) {
    const roadnet::Edge& e = edges[v.edge_idx];
    const double to_end = (v.forward ? 1.0 - v.t : v.t) * e.length_m;
    if (meters < to_end) {
      const double dt = meters / e.length_m;
      v.t = v.forward ? v.t + dt : v.t - dt;
      return;
    }
    meters -= to_end;
    const std::int64_t at_id = v.forward ? e.to : e.from;
    const std::size_t at = net_->node_index(at_id);
    const auto inc = net_->incident(at);
    std::vector<std::size_t> options;
    for (std::size_t ei : inc) {
      if (ei != v.edge_idx) options.push_back(ei);
    }
    if (options.empty()) options.push_back(v.edge_idx);  // dead end: turn around
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    v.edge_idx = options[pick(move_rng_)];
    v.forward = edges[v.edge_idx].from == at_id;
    v.t = v.forward ? 0.0 : 1.0;
  }
}

geo::GeoPoint Simulator::position(const VehicleState& v) const {
  const auto& e = net_->edges()[v.edge_idx];
  const auto& a = net_->from_pos(e);
  const auto& b = net_->to_pos(e);
  if (v.t <= 0.0) return a;
  if (v.t >= 1.0) return b;
  return geo::lerp(a, b, v.t);
}

std::vector<services::LocationUpdate> Simulator::step(std::int64_t dt_ms) {
  std::vector<services::LocationUpdate> out;
  if (dt_ms <= 0) return out;
  for (auto& [index, v] : vehicles_) {
    advance(v, v.speed_mps * static_cast<double>(dt_ms) / 1000.0);
    v.since_update_ms += dt_ms;
    if (v.since_update_ms < config_.update_interval_ms) continue;
    v.since_update_ms %= config_.update_interval_ms;

    geo::GeoPoint p = position(v);
    if (config_.gps_noise_m > 0.0) {
      std::normal_distribution<double> noise(0.0, config_.gps_noise_m);
      const double north = noise(noise_rng_);
      const double east = noise(noise_rng_);
      p.lat += north / kMetersPerDegree;
      p.lon += east / (kMetersPerDegree * std::cos(geo::deg2rad(p.lat)));
    }
    services::LocationUpdate u;
    u.vehicle_id = v.vehicle_id;
    u.point = p;
    u.ts_ms = clock_->now_ms();
    u.seq = v.next_seq++;
    u.trace.trace_id = framekit::new_trace_id(trace_rng_);
    u.trace.vehicle_id = v.vehicle_id;
    u.trace.seq = u.seq;
    framekit::stamp(u.trace, framekit::Stage::kEmit, *clock_);
    out.push_back(std::move(u));
  }
  return out;
}

void Simulator::apply_config(const SimConfig& config) {
  require_valid(config);
  config_.update_interval_ms = config.update_interval_ms;
  config_.gps_noise_m = config.gps_noise_m;
  config_.speed_mps = config.speed_mps;
  config_.vehicle_count = config.vehicle_count;
  for (auto& [i, v] : vehicles_) v.speed_mps = config.speed_mps;
  while (static_cast<int>(vehicles_.size()) > config_.vehicle_count) {
    vehicles_.erase(std::prev(vehicles_.end()));
  }
  while (static_cast<int>(vehicles_.size()) < config_.vehicle_count) spawn();
}

std::vector<VehicleState> Simulator::vehicles() const {
  std::vector<VehicleState> out;
  for (const auto& [i, v] : vehicles_) out.push_back(v);
  return out;
}

}  // namespace tollgrid::simulator
