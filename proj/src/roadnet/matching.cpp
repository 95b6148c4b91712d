#include "tollgrid/roadnet/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace tollgrid::roadnet {
namespace {

constexpr double kOnEdgeEps = 1e-12;
constexpr double kTieEps = 1e-12;

GeoPoint point_at(const GeoPoint& a, const GeoPoint& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  return geo::lerp(a, b, t);
}

struct Snap {
  std::size_t edge_idx;
  double t;
  GeoPoint point;
};

Snap snap(const RoadNetwork& net, const GeoPoint& p) {
  const MatchedPoint m = nearest_edge(net, p);
  return {net.edge_index(m.edge_id), m.t, m.point};
}

}  // namespace

double scaled_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b, double* t_out) {
  const double k = std::cos(geo::deg2rad(p.lat));
  const double ax = (a.lon - p.lon) * k, ay = a.lat - p.lat;
  const double bx = (b.lon - p.lon) * k, by = b.lat - p.lat;
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(-(ax * dx + ay * dy) / len2, 0.0, 1.0);
  if (t_out != nullptr) *t_out = t;
  const double ex = ax + t * dx, ey = ay + t * dy;
  return std::sqrt(ex * ex + ey * ey);
}

MatchedPoint nearest_edge(const RoadNetwork& net, const GeoPoint& p) {
  if (net.empty()) throw ContractError("nearest_edge: empty network");
  double best = std::numeric_limits<double>::infinity();
  const Edge* best_edge = nullptr;
  double best_t = 0.0;
  // edges() is sorted by id, so only a clearly smaller distance replaces the
  // current best and ties keep the lowest id. The tolerance absorbs rounding
  // when the closest point is a node shared by several edges.
  for (const Edge& e : net.edges()) {
    double t = 0.0;
    const double d = scaled_distance(p, net.from_pos(e), net.to_pos(e), &t);
    if (!best_edge || d < best - kTieEps * best) {
      best = d;
      best_edge = &e;
      best_t = t;
    }
  }
  MatchedPoint m;
  m.edge_id = best_edge->id;
  m.t = best_t;
  // A point already on the edge maps to itself so re-matching is exact.
  m.point = best <= kOnEdgeEps ? p : point_at(net.from_pos(*best_edge), net.to_pos(*best_edge), best_t);
  m.deviation_m = geo::haversine_m(p, m.point);
  return m;
}

geo::Polyline match_trace(const RoadNetwork& net, std::span<const GeoPoint> raw) {
  if (raw.size() < 2) throw ContractError("match_trace: need at least two points");
  const auto& edges = net.edges();
  const auto& nodes = net.nodes();
  std::vector<GeoPoint> out;

  Snap prev = snap(net, raw[0]);
  out.push_back(prev.point);
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const Snap cur = snap(net, raw[i]);
    if (cur.edge_idx != prev.edge_idx) {
      // Multi-source Dijkstra from both ends of the previous edge.
      const Edge& e1 = edges[prev.edge_idx];
      const Edge& e2 = edges[cur.edge_idx];
      const std::size_t n = nodes.size();
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      std::vector<std::size_t> via(n, n);
      using Item = std::pair<double, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      const std::size_t u1 = net.node_index(e1.from), v1 = net.node_index(e1.to);
      dist[u1] = prev.t * e1.length_m;
      dist[v1] = (1.0 - prev.t) * e1.length_m;
      pq.push({dist[u1], u1});
      pq.push({dist[v1], v1});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (std::size_t ei : net.incident(u)) {
          const Edge& e = edges[ei];
          const std::size_t a = net.node_index(e.from), b = net.node_index(e.to);
          const std::size_t w = a == u ? b : a;
          if (d + e.length_m < dist[w]) {
            dist[w] = d + e.length_m;
            via[w] = u;
            pq.push({dist[w], w});
          }
        }
      }
      const std::size_t u2 = net.node_index(e2.from), v2 = net.node_index(e2.to);
      const double via_u2 = dist[u2] + cur.t * e2.length_m;
      const double via_v2 = dist[v2] + (1.0 - cur.t) * e2.length_m;
      if (!std::isfinite(via_u2) && !std::isfinite(via_v2)) {
        throw MatchError("no road path between trace points " + std::to_string(i - 1) + " and " +
                             std::to_string(i),
                         i - 1, i);
      }
      std::size_t node = via_u2 <= via_v2 ? u2 : v2;
      std::vector<GeoPoint> path;
      for (; node != n; node = via[node]) path.push_back(nodes[node].pos);
      out.insert(out.end(), path.rbegin(), path.rend());
    }
    out.push_back(cur.point);
    prev = cur;
  }
  try {
    return geo::Polyline(std::move(out));
  } catch (const ContractError&) {
    throw MatchError("trace collapses to a single point", 0, raw.size() - 1);
  }
}

}  // namespace tollgrid::roadnet
