#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tollgrid/geo/geo_point.hpp"

namespace tollgrid::roadnet {

using geo::GeoPoint;

struct Node {
  std::int64_t id = 0;
  GeoPoint pos;
};

struct Edge {
  std::int64_t id = 0;
  std::int64_t from = 0;
  std::int64_t to = 0;
  double length_m = 0.0;  // haversine of the endpoints, computed at load
};

// Undirected road graph. Edges are kept sorted by id; immutable once built.
class RoadNetwork {
 public:
  RoadNetwork() = default;
  // Validates references and coordinates, computes lengths. Throws LoadError
  // naming the offending record.
  RoadNetwork(std::vector<Node> nodes, std::vector<Edge> edges);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  const Node& node(std::int64_t id) const;
  const Edge& edge(std::int64_t id) const;
  std::size_t node_index(std::int64_t id) const;
  std::size_t edge_index(std::int64_t id) const;
  const GeoPoint& from_pos(const Edge& e) const { return nodes_[node_index(e.from)].pos; }
  const GeoPoint& to_pos(const Edge& e) const { return nodes_[node_index(e.to)].pos; }
  // Positions (into edges()) of edges touching the node at position `node_idx`.
  std::span<const std::size_t> incident(std::size_t node_idx) const { return incident_[node_idx]; }

  bool is_connected() const;
  geo::BBox bbox() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::int64_t, std::size_t> node_at_;
  std::unordered_map<std::int64_t, std::size_t> edge_at_;
  std::vector<std::vector<std::size_t>> incident_;
};

// Network file: {"nodes":[{"id","lat","lon"}], "edges":[{"id","from","to"}]}.
// A disconnected graph loads with a logged warning.
RoadNetwork parse_network(const std::string& json_text);
RoadNetwork load_network(const std::string& path);
std::string network_to_json(const RoadNetwork& net);

struct GridSpec {
  int rows = 10;
  int cols = 11;
  double spacing_deg = 0.005;
  std::uint64_t seed = 1;
  GeoPoint origin{52.50, 13.35};
  // Node positions are perturbed uniformly by up to this fraction of spacing.
  double jitter_fraction = 0.2;
};

// Deterministic jittered grid: rows*cols nodes, 4-neighbour edges.
RoadNetwork make_grid(const GridSpec& spec);

}  // namespace tollgrid::roadnet
