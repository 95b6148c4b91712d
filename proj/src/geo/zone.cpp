#include "tollgrid/geo/zone.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "planar.hpp"
#include "tollgrid/error.hpp"

namespace tollgrid::geo {

BBox PollutionZone::bbox() const {
  BBox box{ring.front().lon, ring.front().lat, ring.front().lon, ring.front().lat};
  for (const auto& p : ring) {
    box.min_lon = std::fmin(box.min_lon, p.lon);
    box.max_lon = std::fmax(box.max_lon, p.lon);
    box.min_lat = std::fmin(box.min_lat, p.lat);
    box.max_lat = std::fmax(box.max_lat, p.lat);
  }
  return box;
}

bool on_boundary(const GeoPoint& p, std::span<const GeoPoint> ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (planar::point_segment_distance(p, ring[j], ring[i]) <= planar::kBoundaryEps) return true;
  }
  return false;
}

bool point_in_zone(const GeoPoint& p, std::span<const GeoPoint> ring) {
  if (ring.size() < 3) throw ContractError("zone ring needs at least three vertices");
  if (on_boundary(p, ring)) return true;
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

void validate_zone(const PollutionZone& zone) {
  const std::string who = "zone '" + zone.zone_id + "': ";
  if (zone.zone_id.empty()) throw DataError("zone with empty zone_id");
  if (zone.level < kMinLevel || zone.level > kMaxLevel) {
    throw DataError(who + "level " + std::to_string(zone.level) + " outside 1..5");
  }
  if (zone.ring.size() < 3) throw DataError(who + "ring needs at least three vertices");
  for (const auto& p : zone.ring) {
    if (!is_valid(p)) throw DataError(who + "invalid coordinate");
  }
  const auto& r = zone.ring;
  const std::size_t n = r.size();
  if (r.front() == r.back()) throw DataError(who + "ring must be stored open");
  for (std::size_t i = 0; i < n; ++i) {
    if (r[i] == r[(i + 1) % n]) throw DataError(who + "repeated vertex");
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (planar::segments_touch(r[i], r[(i + 1) % n], r[j], r[(j + 1) % n])) {
        throw DataError(who + "ring is self-intersecting");
      }
    }
  }
}

namespace {

bool strictly_inside(const GeoPoint& p, const PollutionZone& z) {
  return !on_boundary(p, z.ring) && point_in_zone(p, z.ring);
}

bool interiors_overlap(const PollutionZone& a, const PollutionZone& b) {
  const std::size_t na = a.ring.size();
  const std::size_t nb = b.ring.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (planar::proper_crossing(a.ring[i], a.ring[(i + 1) % na], b.ring[j],
                                  b.ring[(j + 1) % nb])) {
        return true;
      }
    }
  }
  auto probes_inside = [](const PollutionZone& x, const PollutionZone& y) {
    const std::size_t n = x.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const GeoPoint& p = x.ring[i];
      const GeoPoint mid = lerp(p, x.ring[(i + 1) % n], 0.5);
      if (strictly_inside(p, y) || strictly_inside(mid, y)) return true;
    }
    return false;
  };
  if (probes_inside(a, b) || probes_inside(b, a)) return true;
  // Identical rings: every vertex of each lies on the other's boundary.
  auto all_on = [](const PollutionZone& x, const PollutionZone& y) {
    for (const auto& p : x.ring) {
      if (!on_boundary(p, y.ring)) return false;
    }
    return true;
  };
  return all_on(a, b) && all_on(b, a);
}

}  // namespace

void validate_zones(std::span<const PollutionZone> zones) {
  std::set<std::string> ids;
  for (const auto& z : zones) {
    validate_zone(z);
    if (!ids.insert(z.zone_id).second) throw DataError("duplicate zone_id '" + z.zone_id + "'");
  }
  std::vector<BBox> boxes;
  boxes.reserve(zones.size());
  for (const auto& z : zones) boxes.push_back(z.bbox());
  for (std::size_t i = 0; i < zones.size(); ++i) {
    for (std::size_t j = i + 1; j < zones.size(); ++j) {
      if (!boxes[i].intersects(boxes[j])) continue;
      if (interiors_overlap(zones[i], zones[j])) {
        throw DataError("zones '" + zones[i].zone_id + "' and '" + zones[j].zone_id +
                        "' overlap");
      }
    }
  }
}

std::vector<PollutionZone> parse_zones(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("zone file: ") + e.what());
  }
  if (!doc.is_array()) throw LoadError("zone file: expected a JSON array");
  std::vector<PollutionZone> zones;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    try {
      PollutionZone z;
      z.zone_id = item.at("zone_id").get<std::string>();
      z.level = item.at("level").get<int>();
      for (const auto& v : item.at("ring")) {
        if (!v.is_array() || v.size() != 2) throw LoadError("ring vertex must be [lon, lat]");
        z.ring.push_back(GeoPoint{v[1].get<double>(), v[0].get<double>()});
      }
      if (z.ring.size() > 1 && z.ring.front() == z.ring.back()) z.ring.pop_back();
      zones.push_back(std::move(z));
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("zone file: record " + std::to_string(i) + ": " + e.what());
    }
  }
  validate_zones(zones);
  return zones;
}

std::vector<PollutionZone> load_zones(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open zone file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_zones(ss.str());
}

std::string zones_to_json(std::span<const PollutionZone> zones) {
  auto doc = nlohmann::json::array();
  for (const auto& z : zones) {
    auto ring = nlohmann::json::array();
    for (const auto& p : z.ring) ring.push_back({p.lon, p.lat});
    doc.push_back({{"zone_id", z.zone_id}, {"level", z.level}, {"ring", ring}});
  }
  return doc.dump(2);
}

}  // namespace tollgrid::geo
