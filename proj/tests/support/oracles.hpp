#pragma once

// Reference implementations used to check the library. They are written
// independently of the code under test and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tollgrid/geo/geo_point.hpp"
#include "tollgrid/geo/zone.hpp"
#include "tollgrid/roadnet/network.hpp"

namespace oracle {

using tollgrid::geo::GeoPoint;

constexpr double kPi = 3.14159265358979323846;

// Winding number of ring around p (x = lon, y = lat). Non-zero means inside.
inline int winding_number(const GeoPoint& p, const std::vector<GeoPoint>& ring) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    const double side = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
    if (a.lat <= p.lat) {
      if (b.lat > p.lat && side > 0) ++wn;
    } else {
      if (b.lat <= p.lat && side < 0) --wn;
    }
  }
  return wn;
}

inline bool inside(const GeoPoint& p, const std::vector<GeoPoint>& ring) {
  return winding_number(p, ring) != 0;
}

// Euclidean distance from p to segment a-b in the lon/lat plane.
inline double plane_segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double vx = b.lon - a.lon, vy = b.lat - a.lat;
  const double wx = p.lon - a.lon, wy = p.lat - a.lat;
  const double vv = vx * vx + vy * vy;
  double t = vv == 0 ? 0 : (wx * vx + wy * vy) / vv;
  t = std::max(0.0, std::min(1.0, t));
  return std::hypot(wx - t * vx, wy - t * vy);
}

inline double distance_to_ring(const GeoPoint& p, const std::vector<GeoPoint>& ring) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    d = std::min(d, plane_segment_distance(p, ring[i], ring[(i + 1) % ring.size()]));
  }
  return d;
}

// Zones are closed: points within this many degrees of a ring count as inside.
inline constexpr double kBoundaryGuardDeg = 1e-9;

// Highest level among zones containing p, boundary included (0 if none).
inline int level_of(const GeoPoint& p, const std::vector<tollgrid::geo::PollutionZone>& zones) {
  int level = 0;
  for (const auto& z : zones) {
    if (inside(p, z.ring) || distance_to_ring(p, z.ring) <= kBoundaryGuardDeg) level = std::max(level, z.level);
  }
  return level;
}

// Great-circle distance with the spherical law of cosines on the same radius.
inline double great_circle_m(const GeoPoint& a, const GeoPoint& b) {
  const double r = 6'371'000.0;
  const double p1 = a.lat * kPi / 180, p2 = b.lat * kPi / 180;
  const double dl = (b.lon - a.lon) * kPi / 180;
  const double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return r * std::acos(std::max(-1.0, std::min(1.0, c)));
}

// Distance in meters from p to edge a-b on a local tangent plane centred on p
// (equirectangular projection). Proportional to the snapping metric.
inline double local_edge_distance_m(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double r = 6'371'000.0;
  const double kx = r * std::cos(p.lat * kPi / 180) * kPi / 180;
  const double ky = r * kPi / 180;
  const double ax = (a.lon - p.lon) * kx, ay = (a.lat - p.lat) * ky;
  const double bx = (b.lon - p.lon) * kx, by = (b.lat - p.lat) * ky;
  const double vx = bx - ax, vy = by - ay;
  const double vv = vx * vx + vy * vy;
  double t = vv == 0 ? 0 : -(ax * vx + ay * vy) / vv;
  t = std::max(0.0, std::min(1.0, t));
  return std::hypot(ax + t * vx, ay + t * vy);
}

// Linear scan for the closest edge; ties resolved to the lowest id.
inline std::int64_t nearest_edge_id(const tollgrid::roadnet::RoadNetwork& net, const GeoPoint& p) {
  std::int64_t best_id = -1;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : net.edges()) {
    const double d = local_edge_distance_m(p, net.from_pos(e), net.to_pos(e));
    // Distances equal to within a nanometre are ties (typically a shared node).
    if (best_id < 0 || d < best - 1e-9 || (d <= best + 1e-9 && e.id < best_id)) {
      best = d;
      best_id = e.id;
    }
  }
  return best_id;
}

// Nearest-rank percentile by sorting a copy.
template <typename T>
T percentile_by_sort(std::vector<T> values, double q) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::size_t rank = 1;
  while (static_cast<double>(rank) < q / 100.0 * n) ++rank;
  return values[std::min(rank, values.size()) - 1];
}

// Circuit breaker reference model as an explicit transition table over the
// events of a synchronous caller: S (call succeeds), F (call fails), W (time
// passes by wait_ms). Half-open is transient for a synchronous caller, so the
// model tracks only closed/open plus the consecutive-failure count.
struct BreakerModel {
  enum class State { kClosed, kOpen };
  int threshold;
  std::int64_t reset_ms;
  std::int64_t wait_ms;

  State state = State::kClosed;
  int failures = 0;
  std::int64_t open_elapsed = 0;

  // Returns whether the operation ran.
  bool apply(char event) {
    switch (event) {
      case 'W':
        if (state == State::kOpen) open_elapsed += wait_ms;
        return false;
      case 'S':
      case 'F': {
        if (state == State::kOpen && open_elapsed < reset_ms) return false;  // rejected
        const bool probe = state == State::kOpen;
        if (event == 'S') {
          state = State::kClosed;
          failures = 0;
        } else {
          ++failures;
          if (probe || failures >= threshold) {
            state = State::kOpen;
            open_elapsed = 0;
          }
        }
        return true;
      }
    }
    return false;
  }
};

}  // namespace oracle
