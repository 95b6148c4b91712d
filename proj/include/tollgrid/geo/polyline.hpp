#pragma once

#include <span>
#include <vector>

#include "tollgrid/geo/geo_point.hpp"

namespace tollgrid::geo {

// Ordered list of at least two points with no consecutive duplicates.
class Polyline {
 public:
  // Removes consecutive duplicate points, then validates. Throws
  // ContractError for invalid coordinates or fewer than two distinct points.
  explicit Polyline(std::vector<GeoPoint> points);

  const std::vector<GeoPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const GeoPoint& front() const { return points_.front(); }
  const GeoPoint& back() const { return points_.back(); }

  bool operator==(const Polyline&) const = default;

 private:
  std::vector<GeoPoint> points_;
};

// Sum of haversine distances between consecutive points.
double polyline_length_m(std::span<const GeoPoint> points);
inline double polyline_length_m(const Polyline& pl) { return polyline_length_m(pl.points()); }

}  // namespace tollgrid::geo
