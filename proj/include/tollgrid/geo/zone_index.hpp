#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tollgrid/geo/geo_point.hpp"
#include "tollgrid/geo/zone.hpp"

namespace tollgrid::geo {

// Uniform grid over the lon/lat plane. Every zone is listed in every cell its
// bounding box overlaps. Immutable after construction.
class ZoneIndex {
 public:
  ZoneIndex() = default;
  ZoneIndex(std::span<const PollutionZone> zones, double cell_size_deg = 0.01);

  // Positions (into the zone list the index was built from) of every zone
  // whose bounding box intersects the box of segment a-b. Sorted, unique.
  std::vector<std::size_t> candidates(const GeoPoint& a, const GeoPoint& b) const;
  std::vector<std::string> candidate_ids(const GeoPoint& a, const GeoPoint& b) const;

  double cell_size_deg() const { return cell_; }
  std::size_t zone_count() const { return boxes_.size(); }
  std::size_t cell_count() const { return cells_.size(); }

 private:
  static std::uint64_t key(std::int64_t ix, std::int64_t iy);
  std::int64_t cell_of(double v) const;

  double cell_ = 0.01;
  std::vector<BBox> boxes_;
  std::vector<std::string> ids_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

inline ZoneIndex build_index(std::span<const PollutionZone> zones, double cell_size_deg = 0.01) {
  return ZoneIndex(zones, cell_size_deg);
}

}  // namespace tollgrid::geo
