#pragma once

#include <span>
#include <string>
#include <vector>

#include "tollgrid/geo/geo_point.hpp"

namespace tollgrid::geo {

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 5;

// Leveled pollution polygon. The ring is stored open (first != last);
// closure is implicit.
struct PollutionZone {
  std::string zone_id;
  std::vector<GeoPoint> ring;
  int level = 1;

  BBox bbox() const;
};

// Even-odd ray casting in the lon/lat plane. Points on the boundary are
// inside. Throws ContractError for rings with fewer than three vertices.
bool point_in_zone(const GeoPoint& p, std::span<const GeoPoint> ring);
// True when p lies on an edge of the ring (within 1e-12 degrees).
bool on_boundary(const GeoPoint& p, std::span<const GeoPoint> ring);

// Checks one zone: level range, >= 3 vertices, valid coordinates, simple
// ring. Throws DataError naming the zone.
void validate_zone(const PollutionZone& zone);
// validate_zone on each, unique ids, and pairwise non-overlapping interiors
// (shared edges are allowed). Throws DataError.
void validate_zones(std::span<const PollutionZone> zones);

// Zone file: JSON array of {zone_id, level, ring: [[lon, lat], ...]}.
// A closing vertex equal to the first is dropped. Validates the whole set.
std::vector<PollutionZone> parse_zones(const std::string& json_text);
std::vector<PollutionZone> load_zones(const std::string& path);
std::string zones_to_json(std::span<const PollutionZone> zones);

}  // namespace tollgrid::geo
