#pragma once

#include <span>
#include <vector>

#include "tollgrid/geo/polyline.hpp"
#include "tollgrid/geo/zone.hpp"
#include "tollgrid/geo/zone_index.hpp"

namespace tollgrid::geo {

// Maximal run of a route whose interior lies in zones of one level
// (0 = outside every zone).
struct LeveledSegment {
  Polyline polyline;
  int level = 0;
  double length_m = 0.0;
};

// Level of the zone containing p, 0 if none. On a shared boundary the
// higher level wins.
int level_at(const GeoPoint& p, std::span<const PollutionZone> zones, const ZoneIndex& index);

// Splits a polyline at every crossing with a zone boundary and merges equal
// adjacent levels. Intersections and containment are planar in lon/lat;
// lengths are haversine. Zones must already be validated non-overlapping.
//
// The segments partition the input in order: concatenating their polylines
// gives the input vertices plus inserted boundary points, and their lengths
// sum to the input length.
std::vector<LeveledSegment> split_by_zones(const Polyline& pl,
                                           std::span<const PollutionZone> zones,
                                           const ZoneIndex& index);

}  // namespace tollgrid::geo
