#include "tollgrid/geo/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "planar.hpp"
#include "tollgrid/error.hpp"

namespace tollgrid::geo {
namespace {

// Sub-leg parameters closer than this are merged.
constexpr double kParamEps = 1e-9;

int level_among(const GeoPoint& p, std::span<const PollutionZone> zones,
                std::span<const std::size_t> candidates) {
  int level = 0;
  for (std::size_t i : candidates) {
    const auto& z = zones[i];
    if (z.level > level && point_in_zone(p, z.ring)) level = z.level;
  }
  return level;
}

// Parameters t in (0, 1) where leg a-b meets an edge of the ring.
void edge_crossings(const GeoPoint& a, const GeoPoint& b, std::span<const GeoPoint> ring,
                    std::vector<double>& ts) {
  const double rx = b.lon - a.lon;
  const double ry = b.lat - a.lat;
  const double len2 = rx * rx + ry * ry;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& c = ring[j];
    const GeoPoint& d = ring[i];
    const double sx = d.lon - c.lon;
    const double sy = d.lat - c.lat;
    const double qx = c.lon - a.lon;
    const double qy = c.lat - a.lat;
    const double denom = rx * sy - ry * sx;
    const double qxr = qx * ry - qy * rx;
    const double slen = std::sqrt(sx * sx + sy * sy);
    const double rlen = std::sqrt(len2);
    if (std::fabs(denom) > 1e-15 * rlen * slen) {
      const double t = (qx * sy - qy * sx) / denom;
      const double u = qxr / denom;
      if (u >= -kParamEps && u <= 1.0 + kParamEps && t > 0.0 && t < 1.0) ts.push_back(t);
    } else if (std::fabs(qxr) <= 1e-15 * rlen * std::max(rlen, std::sqrt(qx * qx + qy * qy))) {
      // Collinear: the overlap starts/ends at the projections of c and d.
      for (const GeoPoint* e : {&c, &d}) {
        const double t = ((e->lon - a.lon) * rx + (e->lat - a.lat) * ry) / len2;
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
    }
  }
}

}  // namespace

int level_at(const GeoPoint& p, std::span<const PollutionZone> zones, const ZoneIndex& index) {
  return level_among(p, zones, index.candidates(p, p));
}

std::vector<LeveledSegment> split_by_zones(const Polyline& pl,
                                           std::span<const PollutionZone> zones,
                                           const ZoneIndex& index) {
  if (index.zone_count() != zones.size()) {
    throw ContractError("split_by_zones: index was built from a different zone list");
  }
  struct Run {
    std::vector<GeoPoint> points;
    int level;
  };
  std::vector<Run> runs;
  auto extend = [&](const GeoPoint& from, const GeoPoint& to, int level) {
    if (from == to) return;
    if (!runs.empty() && runs.back().level == level) {
      runs.back().points.push_back(to);
    } else {
      runs.push_back({{from, to}, level});
    }
  };

  const auto& pts = pl.points();
  std::vector<double> ts;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const GeoPoint& a = pts[k - 1];
    const GeoPoint& b = pts[k];
    const auto cand = index.candidates(a, b);
    ts.assign({0.0, 1.0});
    for (std::size_t i : cand) edge_crossings(a, b, zones[i].ring, ts);
    std::sort(ts.begin(), ts.end());
    std::vector<double> cuts;
    for (double t : ts) {
      if (cuts.empty() || t - cuts.back() > kParamEps) cuts.push_back(t);
    }
    cuts.back() = 1.0;
    GeoPoint from = a;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      const GeoPoint to = i + 1 == cuts.size() ? b : lerp(a, b, cuts[i]);
      const GeoPoint mid = lerp(a, b, 0.5 * (cuts[i - 1] + cuts[i]));
      extend(from, to, level_among(mid, zones, cand));
      if (!(from == to)) from = to;
    }
  }

  std::vector<LeveledSegment> out;
  out.reserve(runs.size());
  for (auto& r : runs) {
    Polyline seg(std::move(r.points));
    const double len = polyline_length_m(seg);
    out.push_back({std::move(seg), r.level, len});
  }
  return out;
}

}  // namespace tollgrid::geo
