#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tollgrid/services/messages.hpp"

namespace tollgrid::gateway {

struct VehicleView {
  std::string vehicle_id;
  std::deque<geo::Polyline> routes;  // oldest first, bounded
  services::MicroEuros cumulative_micro_eur = 0;
  double distance_m_total = 0.0;
  std::int64_t last_update_ms = 0;
  std::uint64_t tolls_seen = 0;
};

// Latest known state per vehicle, fed by route and toll messages. Thread-safe.
class GatewayState {
 public:
  explicit GatewayState(std::size_t route_history = 100) : history_(route_history) {}

  void on_route(const services::RouteMsg& msg, std::int64_t now_ms);
  void on_toll(const services::TollMsg& msg, std::int64_t now_ms);

  std::optional<VehicleView> vehicle(const std::string& id) const;
  std::vector<VehicleView> vehicles() const;  // by vehicle id
  std::size_t size() const;

 private:
  VehicleView& view_locked(const std::string& id);

  std::size_t history_;
  mutable std::mutex mu_;
  std::map<std::string, VehicleView> views_;
};

// Money as a two-decimal string plus the exact micro-euro integer.
// With full_history the whole retained route list is included, otherwise
// only the latest route.
nlohmann::json to_json(const VehicleView& v, bool full_history);
// Rows {vehicle_id, cumulative_eur, cumulative_micro_eur, distance_m_total},
// highest cumulative first, ties by vehicle id.
nlohmann::json toll_table(const std::vector<VehicleView>& views);

}  // namespace tollgrid::gateway
