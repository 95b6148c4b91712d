#pragma once

#include <cstdint>
#include <vector>

#include "tollgrid/geo/geo_point.hpp"
#include "tollgrid/geo/zone.hpp"

namespace tollgrid::geo {

// `count` random axis-aligned rectangles inside `area`, non-overlapping by
// construction (at most one per cell of a coarse grid), levels uniform in
// 1..5. Deterministic for a given seed.
std::vector<PollutionZone> generate_rect_zones(const BBox& area, int count, std::uint64_t seed);

}  // namespace tollgrid::geo
