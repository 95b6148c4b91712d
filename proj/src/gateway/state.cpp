#include "tollgrid/gateway/state.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace tollgrid::gateway {

VehicleView& GatewayState::view_locked(const std::string& id) {
  auto& v = views_[id];
  v.vehicle_id = id;
  return v;
}

void GatewayState::on_route(const services::RouteMsg& msg, std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto& v = view_locked(msg.vehicle_id);
  v.routes.push_back(msg.polyline);
  while (v.routes.size() > history_) v.routes.pop_front();
  v.last_update_ms = now_ms;
}

void GatewayState::on_toll(const services::TollMsg& msg, std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  auto& v = view_locked(msg.vehicle_id);
  v.cumulative_micro_eur = msg.cumulative_micro_eur;
  v.distance_m_total = msg.distance_m_total;
  v.last_update_ms = now_ms;
  ++v.tolls_seen;
}

std::optional<VehicleView> GatewayState::vehicle(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = views_.find(id);
  if (it == views_.end()) return std::nullopt;
  return it->second;
}

std::vector<VehicleView> GatewayState::vehicles() const {
  std::lock_guard lock(mu_);
  std::vector<VehicleView> out;
  out.reserve(views_.size());
  for (const auto& [id, v] : views_) out.push_back(v);
  return out;
}

std::size_t GatewayState::size() const {
  std::lock_guard lock(mu_);
  return views_.size();
}

nlohmann::json to_json(const VehicleView& v, bool full_history) {
  nlohmann::json j = {{"vehicle_id", v.vehicle_id},
                      {"cumulative_eur", services::format_eur(v.cumulative_micro_eur)},
                      {"cumulative_micro_eur", v.cumulative_micro_eur},
                      {"distance_m_total", v.distance_m_total},
                      {"last_update_ms", v.last_update_ms},
                      {"routes_retained", v.routes.size()}};
  j["route"] = v.routes.empty() ? nlohmann::json(nullptr) : services::polyline_to_json(v.routes.back());
  if (full_history) {
    auto routes = nlohmann::json::array();
    for (const auto& r : v.routes) routes.push_back(services::polyline_to_json(r));
    j["routes"] = std::move(routes);
  }
  return j;
}

nlohmann::json toll_table(const std::vector<VehicleView>& views) {
  std::vector<const VehicleView*> order;
  for (const auto& v : views) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](const VehicleView* a, const VehicleView* b) {
    if (a->cumulative_micro_eur != b->cumulative_micro_eur) {
      return a->cumulative_micro_eur > b->cumulative_micro_eur;
    }
    return a->vehicle_id < b->vehicle_id;
  });
  auto rows = nlohmann::json::array();
  for (const auto* v : order) {
    rows.push_back({{"vehicle_id", v->vehicle_id},
                    {"cumulative_eur", services::format_eur(v->cumulative_micro_eur)},
                    {"cumulative_micro_eur", v->cumulative_micro_eur},
                    {"distance_m_total", v->distance_m_total}});
  }
  return rows;
}

}  // namespace tollgrid::gateway
