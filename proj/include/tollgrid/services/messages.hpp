#pragma once

// Pipeline message types and their JSON encoding. Field names are the
// snake_case member names; schemas live in docs/schemas/.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tollgrid/framekit/trace.hpp"
#include "tollgrid/geo/polyline.hpp"
#include "tollgrid/geo/segmentation.hpp"

namespace tollgrid::services {

using framekit::TraceContext;
using geo::GeoPoint;

// Integer micro-euros; 1 EUR = 1 000 000.
using MicroEuros = std::int64_t;

// Renders with exactly two decimals, rounding half up: 5560 -> "0.01".
std::string format_eur(MicroEuros amount);
inline double to_eur(MicroEuros amount) { return static_cast<double>(amount) / 1e6; }

struct LocationUpdate {
  std::string vehicle_id;
  GeoPoint point;
  std::int64_t ts_ms = 0;
  std::int64_t seq = 0;
  TraceContext trace;
};

struct RouteWindow {
  std::int64_t first_seq = 0;
  std::int64_t last_seq = 0;
};

struct RouteMsg {
  std::string vehicle_id;
  geo::Polyline polyline;
  RouteWindow window;
  TraceContext trace;
};

struct SegmentMsg {
  std::string vehicle_id;
  std::vector<geo::LeveledSegment> segments;
  TraceContext trace;
};

struct TollMsg {
  std::string vehicle_id;
  MicroEuros increment_micro_eur = 0;
  MicroEuros cumulative_micro_eur = 0;
  double distance_m_total = 0.0;
  TraceContext trace;
};

nlohmann::json trace_to_json(const TraceContext& trace);
TraceContext trace_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const GeoPoint& p);
GeoPoint point_from_json(const nlohmann::json& j);
nlohmann::json polyline_to_json(const geo::Polyline& pl);
geo::Polyline polyline_from_json(const nlohmann::json& j);

// encode_* produce compact JSON text; decode_* throw DataError on schema
// violations.
std::string encode(const LocationUpdate& m);
std::string encode(const RouteMsg& m);
std::string encode(const SegmentMsg& m);
std::string encode(const TollMsg& m);

LocationUpdate decode_location_update(const std::string& text);
RouteMsg decode_route(const std::string& text);
SegmentMsg decode_segment(const std::string& text);
TollMsg decode_toll(const std::string& text);

}  // namespace tollgrid::services
