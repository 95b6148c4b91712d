#pragma once

// Planar primitives over (x = lon, y = lat).

#include <algorithm>
#include <cmath>

#include "tollgrid/geo/geo_point.hpp"

namespace tollgrid::geo::planar {

inline constexpr double kBoundaryEps = 1e-12;

inline double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

// Planar distance from p to segment a-b, in degrees.
inline double point_segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2, 0.0, 1.0);
  const double ex = a.lon + t * dx - p.lon;
  const double ey = a.lat + t * dy - p.lat;
  return std::sqrt(ex * ex + ey * ey);
}

inline int orientation(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  const double v = cross(a, b, c);
  const double scale = std::max({std::fabs(b.lon - a.lon), std::fabs(b.lat - a.lat),
                                 std::fabs(c.lon - a.lon), std::fabs(c.lat - a.lat), 1e-300});
  if (std::fabs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

// Segments cross at a single point interior to both.
inline bool proper_crossing(const GeoPoint& p1, const GeoPoint& p2, const GeoPoint& q1,
                            const GeoPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

// Closed segments share at least one point.
inline bool segments_touch(const GeoPoint& p1, const GeoPoint& p2, const GeoPoint& q1,
                           const GeoPoint& q2) {
  if (proper_crossing(p1, p2, q1, q2)) return true;
  return point_segment_distance(q1, p1, p2) <= kBoundaryEps ||
         point_segment_distance(q2, p1, p2) <= kBoundaryEps ||
         point_segment_distance(p1, q1, q2) <= kBoundaryEps ||
         point_segment_distance(p2, q1, q2) <= kBoundaryEps;
}

}  // namespace tollgrid::geo::planar
