#include "tollgrid/geo/zone_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tollgrid/error.hpp"

namespace tollgrid::geo {

std::vector<PollutionZone> generate_rect_zones(const BBox& area, int count, std::uint64_t seed) {
  if (count < 0) throw ContractError("zone count must be >= 0");
  if (count == 0) return {};
  if (!(area.max_lon > area.min_lon && area.max_lat > area.min_lat)) {
    throw ContractError("zone area must have positive extent");
  }
  std::mt19937_64 rng(seed);
  const int g = static_cast<int>(std::ceil(std::sqrt(2.0 * count)));
  std::vector<int> cells(static_cast<std::size_t>(g * g));
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  const double cw = (area.max_lon - area.min_lon) / g;
  const double ch = (area.max_lat - area.min_lat) / g;
  std::uniform_real_distribution<double> lo(0.02, 0.45), hi(0.55, 0.98);
  std::uniform_int_distribution<int> level(kMinLevel, kMaxLevel);
  std::vector<PollutionZone> zones;
  for (int k = 0; k < count; ++k) {
    const int cx = cells[static_cast<std::size_t>(k)] % g;
    const int cy = cells[static_cast<std::size_t>(k)] / g;
    const double x0 = area.min_lon + (cx + lo(rng)) * cw;
    const double x1 = area.min_lon + (cx + hi(rng)) * cw;
    const double y0 = area.min_lat + (cy + lo(rng)) * ch;
    const double y1 = area.min_lat + (cy + hi(rng)) * ch;
    PollutionZone z;
    z.zone_id = "z" + std::to_string(k + 1);
    z.level = level(rng);
    z.ring = {{y0, x0}, {y0, x1}, {y1, x1}, {y1, x0}};
    zones.push_back(std::move(z));
  }
  return zones;
}

}  // namespace tollgrid::geo
