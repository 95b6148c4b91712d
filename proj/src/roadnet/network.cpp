#include "tollgrid/roadnet/network.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/log.hpp"

namespace tollgrid::roadnet {

RoadNetwork::RoadNetwork(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!geo::is_valid(n.pos)) {
      throw LoadError("node " + std::to_string(n.id) + ": invalid coordinate");
    }
    if (!node_at_.emplace(n.id, i).second) {
      throw LoadError("node " + std::to_string(n.id) + ": duplicate id");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  incident_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    Edge& e = edges_[i];
    const std::string who = "edge " + std::to_string(e.id) + ": ";
    if (!edge_at_.emplace(e.id, i).second) throw LoadError(who + "duplicate id");
    auto f = node_at_.find(e.from);
    auto t = node_at_.find(e.to);
    if (f == node_at_.end()) throw LoadError(who + "unknown node " + std::to_string(e.from));
    if (t == node_at_.end()) throw LoadError(who + "unknown node " + std::to_string(e.to));
    if (f->second == t->second) throw LoadError(who + "self-loop");
    e.length_m = geo::haversine_m(nodes_[f->second].pos, nodes_[t->second].pos);
    if (!(e.length_m > 0.0)) throw LoadError(who + "zero length");
    incident_[f->second].push_back(i);
    incident_[t->second].push_back(i);
  }
}

std::size_t RoadNetwork::node_index(std::int64_t id) const {
  auto it = node_at_.find(id);
  if (it == node_at_.end()) throw NotFoundError("unknown node " + std::to_string(id));
  return it->second;
}

std::size_t RoadNetwork::edge_index(std::int64_t id) const {
  auto it = edge_at_.find(id);
  if (it == edge_at_.end()) throw NotFoundError("unknown edge " + std::to_string(id));
  return it->second;
}

const Node& RoadNetwork::node(std::int64_t id) const { return nodes_[node_index(id)]; }
const Edge& RoadNetwork::edge(std::int64_t id) const { return edges_[edge_index(id)]; }

bool RoadNetwork::is_connected() const {
  if (nodes_.empty()) return true;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    for (std::size_t ei : incident_[n]) {
      const Edge& e = edges_[ei];
      for (std::int64_t id : {e.from, e.to}) {
        const std::size_t m = node_at_.at(id);
        if (!seen[m]) {
          seen[m] = true;
          ++count;
          stack.push_back(m);
        }
      }
    }
  }
  return count == nodes_.size();
}

geo::BBox RoadNetwork::bbox() const {
  if (nodes_.empty()) return {};
  geo::BBox b{nodes_[0].pos.lon, nodes_[0].pos.lat, nodes_[0].pos.lon, nodes_[0].pos.lat};
  for (const auto& n : nodes_) {
    b.min_lon = std::min(b.min_lon, n.pos.lon);
    b.max_lon = std::max(b.max_lon, n.pos.lon);
    b.min_lat = std::min(b.min_lat, n.pos.lat);
    b.max_lat = std::max(b.max_lat, n.pos.lat);
  }
  return b;
}

RoadNetwork parse_network(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("network file: ") + e.what());
  }
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
    throw LoadError("network file: expected {\"nodes\": [...], \"edges\": [...]}");
  }
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    const auto& n = doc["nodes"][i];
    try {
      const auto& lat = n.at("lat");
      const auto& lon = n.at("lon");
      if (!lat.is_number() || !lon.is_number()) throw LoadError("non-numeric coordinate");
      nodes.push_back({n.at("id").get<std::int64_t>(), {lat.get<double>(), lon.get<double>()}});
    } catch (const std::exception& e) {
      throw LoadError("network file: node record " + std::to_string(i) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    try {
      edges.push_back({e.at("id").get<std::int64_t>(), e.at("from").get<std::int64_t>(),
                       e.at("to").get<std::int64_t>(), 0.0});
    } catch (const std::exception& ex) {
      throw LoadError("network file: edge record " + std::to_string(i) + ": " + ex.what());
    }
  }
  RoadNetwork net(std::move(nodes), std::move(edges));
  if (!net.is_connected()) {
    framekit::log(framekit::LogLevel::kWarn, "roadnet", "network is not connected");
  }
  return net;
}

RoadNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open network file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string network_to_json(const RoadNetwork& net) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  doc["edges"] = nlohmann::json::array();
  for (const auto& n : net.nodes()) {
    doc["nodes"].push_back({{"id", n.id}, {"lat", n.pos.lat}, {"lon", n.pos.lon}});
  }
  for (const auto& e : net.edges()) {
    doc["edges"].push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}});
  }
  return doc.dump(1);
}

RoadNetwork make_grid(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols < 2) {
    throw ContractError("grid needs at least two nodes");
  }
  if (!(spec.spacing_deg > 0.0)) throw ContractError("grid spacing must be > 0");
  if (spec.jitter_fraction < 0.0 || spec.jitter_fraction >= 0.5) {
    throw ContractError("grid jitter must be in [0, 0.5)");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-spec.jitter_fraction, spec.jitter_fraction);
  auto id_of = [&](int r, int c) { return static_cast<std::int64_t>(r) * spec.cols + c + 1; };
  std::vector<Node> nodes;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const double jy = jitter(rng);
      const double jx = jitter(rng);
      nodes.push_back({id_of(r, c),
                       {spec.origin.lat + (r + jy) * spec.spacing_deg,
                        spec.origin.lon + (c + jx) * spec.spacing_deg}});
    }
  }
  std::vector<Edge> edges;
  std::int64_t next = 1;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      if (c + 1 < spec.cols) edges.push_back({next++, id_of(r, c), id_of(r, c + 1), 0.0});
      if (r + 1 < spec.rows) edges.push_back({next++, id_of(r, c), id_of(r + 1, c), 0.0});
    }
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

}  // namespace tollgrid::roadnet
