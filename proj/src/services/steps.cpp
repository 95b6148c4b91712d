#include "tollgrid/services/steps.hpp"

#include <cmath>
#include <vector>

#include "tollgrid/roadnet/matching.hpp"

namespace tollgrid::services {

using framekit::Stage;

std::optional<RouteMsg> map_matcher_step(std::span<const LocationUpdate> buffer,
                                         const roadnet::RoadNetwork& net,
                                         const framekit::Clock& clock) {
  if (buffer.size() < 2) return std::nullopt;
  TraceContext trace = buffer.back().trace;
  framekit::stamp(trace, Stage::kMatcherIn, clock);
  std::vector<GeoPoint> raw;
  raw.reserve(buffer.size());
  for (const auto& u : buffer) raw.push_back(u.point);
  geo::Polyline route = roadnet::match_trace(net, raw);
  RouteMsg msg{buffer.back().vehicle_id, std::move(route),
               {buffer.front().seq, buffer.back().seq}, std::move(trace)};
  framekit::stamp(msg.trace, Stage::kMatcherOut, clock);
  return msg;
}

std::optional<RouteMsg> MapMatcher::on_update(const LocationUpdate& update,
                                              const framekit::Clock& clock) {
  auto it = last_.find(update.vehicle_id);
  if (it == last_.end()) {
    last_.emplace(update.vehicle_id, update);
    return std::nullopt;
  }
  if (update.seq <= it->second.seq) {
    throw DataError("vehicle " + update.vehicle_id + ": seq " + std::to_string(update.seq) +
                    " not after " + std::to_string(it->second.seq));
  }
  const LocationUpdate window[2] = {it->second, update};
  it->second = update;
  return map_matcher_step(window, net_, clock);
}

SegmentMsg pollution_matcher_step(const RouteMsg& msg, std::span<const geo::PollutionZone> zones,
                                  const geo::ZoneIndex& index, const framekit::Clock& clock) {
  SegmentMsg out;
  out.vehicle_id = msg.vehicle_id;
  out.trace = msg.trace;
  framekit::stamp(out.trace, Stage::kPollutionIn, clock);
  out.segments = geo::split_by_zones(msg.polyline, zones, index);
  framekit::stamp(out.trace, Stage::kPollutionOut, clock);
  return out;
}

TollMsg toll_step(TollState& state, const SegmentMsg& msg, const RateTable& rates,
                  const framekit::Clock& clock) {
  TollMsg out;
  out.vehicle_id = msg.vehicle_id;
  out.trace = msg.trace;
  framekit::stamp(out.trace, Stage::kTollIn, clock);
  double micro = 0.0;
  double distance = 0.0;
  for (const auto& s : msg.segments) {
    micro += s.length_m / 1000.0 * static_cast<double>(rates.micro_eur_per_km(s.level));
    distance += s.length_m;
  }
  VehicleToll& v = state[msg.vehicle_id];
  out.increment_micro_eur = std::llround(micro);
  v.cumulative += out.increment_micro_eur;
  v.distance_m += distance;
  out.cumulative_micro_eur = v.cumulative;
  out.distance_m_total = v.distance_m;
  framekit::stamp(out.trace, Stage::kTollOut, clock);
  return out;
}

}  // namespace tollgrid::services
