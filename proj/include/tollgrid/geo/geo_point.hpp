#pragma once

#include <cmath>

namespace tollgrid::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }

// WGS84 coordinate in degrees. Planar algorithms treat lon as x and lat as y.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

inline bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

// Throws ContractError for non-finite or out-of-range coordinates.
void validate(const GeoPoint& p);

// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Linear interpolation in the lon/lat plane.
inline GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double t) {
  return {a.lat + (b.lat - a.lat) * t, a.lon + (b.lon - a.lon) * t};
}

// Axis-aligned box in the lon/lat plane.
struct BBox {
  double min_lon = 0, min_lat = 0, max_lon = 0, max_lat = 0;

  static BBox of(const GeoPoint& a, const GeoPoint& b) {
    return {std::fmin(a.lon, b.lon), std::fmin(a.lat, b.lat), std::fmax(a.lon, b.lon),
            std::fmax(a.lat, b.lat)};
  }
  bool intersects(const BBox& o) const {
    return min_lon <= o.max_lon && o.min_lon <= max_lon && min_lat <= o.max_lat &&
           o.min_lat <= max_lat;
  }
  bool contains(const GeoPoint& p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }
};

}  // namespace tollgrid::geo
