#pragma once

// The pure per-message logic of the three functional services. The service
// runners wrap these in broker loops.

#include <map>
#include <optional>
#include <span>
#include <string>

#include "tollgrid/framekit/clock.hpp"
#include "tollgrid/geo/zone.hpp"
#include "tollgrid/geo/zone_index.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/services/messages.hpp"
#include "tollgrid/services/rates.hpp"

namespace tollgrid::services {

// Map-matches the buffered updates of one vehicle (ordered by seq). Returns
// nullopt with fewer than two updates. The route carries the newest
// update's trace, stamped matcher_in / matcher_out. Throws MatchError.
std::optional<RouteMsg> map_matcher_step(std::span<const LocationUpdate> buffer,
                                         const roadnet::RoadNetwork& net,
                                         const framekit::Clock& clock);

// Sliding window of two updates per vehicle: the last point of one route is
// the first of the next, so consecutive routes share exactly one vertex.
class MapMatcher {
 public:
  explicit MapMatcher(const roadnet::RoadNetwork& net) : net_(net) {}

  // Throws DataError for a non-increasing seq (the update is ignored) and
  // MatchError when matching fails (the window still advances).
  std::optional<RouteMsg> on_update(const LocationUpdate& update, const framekit::Clock& clock);

 private:
  const roadnet::RoadNetwork& net_;
  std::map<std::string, LocationUpdate> last_;
};

SegmentMsg pollution_matcher_step(const RouteMsg& msg, std::span<const geo::PollutionZone> zones,
                                  const geo::ZoneIndex& index, const framekit::Clock& clock);

struct VehicleToll {
  MicroEuros cumulative = 0;
  double distance_m = 0.0;
};

using TollState = std::map<std::string, VehicleToll>;

// increment = round(sum over segments of length_km * rate(level)) in
// micro-euros; the vehicle's cumulative total and distance are updated.
// Throws ContractError for a level without a rate.
TollMsg toll_step(TollState& state, const SegmentMsg& msg, const RateTable& rates,
                  const framekit::Clock& clock);

}  // namespace tollgrid::services
