#include "tollgrid/geo/geo_point.hpp"

#include <algorithm>
#include <string>

#include "tollgrid/error.hpp"
#include "tollgrid/geo/polyline.hpp"

namespace tollgrid::geo {

void validate(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw ContractError("invalid coordinate (lat " + std::to_string(p.lat) + ", lon " +
                        std::to_string(p.lon) + ")");
  }
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

Polyline::Polyline(std::vector<GeoPoint> points) {
  for (const auto& p : points) validate(p);
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 2) {
    throw ContractError("polyline needs at least two distinct points");
  }
  points_ = std::move(points);
}

double polyline_length_m(std::span<const GeoPoint> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += haversine_m(points[i - 1], points[i]);
  return total;
}

}  // namespace tollgrid::geo
