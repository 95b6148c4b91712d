#include "tollgrid/geo/zone_index.hpp"

#include <algorithm>
#include <cmath>

#include "tollgrid/error.hpp"

namespace tollgrid::geo {
namespace {

// Beyond this many cells a query scans the zone boxes directly.
constexpr std::int64_t kMaxQueryCells = 4096;

}  // namespace

ZoneIndex::ZoneIndex(std::span<const PollutionZone> zones, double cell_size_deg)
    : cell_(cell_size_deg) {
  if (!(cell_size_deg > 0.0)) throw ContractError("zone index: cell size must be > 0");
  boxes_.reserve(zones.size());
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const BBox box = zones[i].bbox();
    boxes_.push_back(box);
    ids_.push_back(zones[i].zone_id);
    for (std::int64_t ix = cell_of(box.min_lon); ix <= cell_of(box.max_lon); ++ix) {
      for (std::int64_t iy = cell_of(box.min_lat); iy <= cell_of(box.max_lat); ++iy) {
        cells_[key(ix, iy)].push_back(i);
      }
    }
  }
}

std::uint64_t ZoneIndex::key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint32_t>(iy);
}

std::int64_t ZoneIndex::cell_of(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

std::vector<std::size_t> ZoneIndex::candidates(const GeoPoint& a, const GeoPoint& b) const {
  const BBox q = BBox::of(a, b);
  std::vector<std::size_t> out;
  const std::int64_t x0 = cell_of(q.min_lon), x1 = cell_of(q.max_lon);
  const std::int64_t y0 = cell_of(q.min_lat), y1 = cell_of(q.max_lat);
  if ((x1 - x0 + 1) * (y1 - y0 + 1) > kMaxQueryCells) {
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      if (boxes_[i].intersects(q)) out.push_back(i);
    }
    return out;
  }
  for (std::int64_t ix = x0; ix <= x1; ++ix) {
    for (std::int64_t iy = y0; iy <= y1; ++iy) {
      auto it = cells_.find(key(ix, iy));
      if (it == cells_.end()) continue;
      for (std::size_t i : it->second) {
        if (boxes_[i].intersects(q)) out.push_back(i);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> ZoneIndex::candidate_ids(const GeoPoint& a, const GeoPoint& b) const {
  std::vector<std::string> ids;
  for (std::size_t i : candidates(a, b)) ids.push_back(ids_[i]);
  return ids;
}

}  // namespace tollgrid::geo
