#include "tollgrid/services/messages.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"

namespace tollgrid::services {

using nlohmann::json;

std::string format_eur(MicroEuros amount) {
  const bool neg = amount < 0;
  const std::int64_t mag = neg ? -amount : amount;
  const std::int64_t cents = (mag + 5'000) / 10'000;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", neg ? "-" : "",
                static_cast<long long>(cents / 100), static_cast<long long>(cents % 100));
  return buf;
}

json trace_to_json(const TraceContext& trace) {
  json stamps = json::array();
  for (const auto& s : trace.stage_stamps) {
    stamps.push_back({{"stage", framekit::stage_name(s.stage)}, {"ts_us", s.ts_us}});
  }
  return {{"trace_id", trace.trace_id},
          {"vehicle_id", trace.vehicle_id},
          {"seq", trace.seq},
          {"stage_stamps", std::move(stamps)}};
}

TraceContext trace_from_json(const json& j) {
  TraceContext t;
  t.trace_id = j.at("trace_id").get<std::string>();
  t.vehicle_id = j.at("vehicle_id").get<std::string>();
  t.seq = j.at("seq").get<std::int64_t>();
  for (const auto& s : j.at("stage_stamps")) {
    const auto name = s.at("stage").get<std::string>();
    const auto stage = framekit::parse_stage(name);
    if (!stage) throw DataError("unknown trace stage '" + name + "'");
    if (t.has(*stage)) throw DataError("duplicate trace stage '" + name + "'");
    t.stage_stamps.push_back({*stage, s.at("ts_us").get<std::int64_t>()});
  }
  return t;
}

json point_to_json(const GeoPoint& p) { return {{"lat", p.lat}, {"lon", p.lon}}; }

GeoPoint point_from_json(const json& j) {
  GeoPoint p{j.at("lat").get<double>(), j.at("lon").get<double>()};
  geo::validate(p);
  return p;
}

json polyline_to_json(const geo::Polyline& pl) {
  json out = json::array();
  for (const auto& p : pl.points()) out.push_back(point_to_json(p));
  return out;
}

geo::Polyline polyline_from_json(const json& j) {
  std::vector<GeoPoint> pts;
  for (const auto& p : j) pts.push_back(point_from_json(p));
  return geo::Polyline(std::move(pts));
}

namespace {

template <typename Fn>
auto decode_with(const std::string& text, const char* what, Fn&& fn) {
  try {
    return fn(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string encode(const LocationUpdate& m) {
  return json{{"vehicle_id", m.vehicle_id},
              {"point", point_to_json(m.point)},
              {"ts_ms", m.ts_ms},
              {"seq", m.seq},
              {"trace", trace_to_json(m.trace)}}
      .dump();
}

std::string encode(const RouteMsg& m) {
  return json{{"vehicle_id", m.vehicle_id},
              {"polyline", polyline_to_json(m.polyline)},
              {"window", {{"first_seq", m.window.first_seq}, {"last_seq", m.window.last_seq}}},
              {"trace", trace_to_json(m.trace)}}
      .dump();
}

std::string encode(const SegmentMsg& m) {
  json segs = json::array();
  for (const auto& s : m.segments) {
    segs.push_back(
        {{"polyline", polyline_to_json(s.polyline)}, {"level", s.level}, {"length_m", s.length_m}});
  }
  return json{{"vehicle_id", m.vehicle_id}, {"segments", std::move(segs)},
              {"trace", trace_to_json(m.trace)}}
      .dump();
}

std::string encode(const TollMsg& m) {
  return json{{"vehicle_id", m.vehicle_id},
              {"increment_eur", to_eur(m.increment_micro_eur)},
              {"cumulative_eur", to_eur(m.cumulative_micro_eur)},
              {"increment_micro_eur", m.increment_micro_eur},
              {"cumulative_micro_eur", m.cumulative_micro_eur},
              {"distance_m_total", m.distance_m_total},
              {"trace", trace_to_json(m.trace)}}
      .dump();
}

LocationUpdate decode_location_update(const std::string& text) {
  return decode_with(text, "location.update", [](const json& j) {
    LocationUpdate m;
    m.vehicle_id = j.at("vehicle_id").get<std::string>();
    m.point = point_from_json(j.at("point"));
    m.ts_ms = j.at("ts_ms").get<std::int64_t>();
    m.seq = j.at("seq").get<std::int64_t>();
    m.trace = trace_from_json(j.at("trace"));
    return m;
  });
}

RouteMsg decode_route(const std::string& text) {
  return decode_with(text, "route", [](const json& j) {
    RouteMsg m{j.at("vehicle_id").get<std::string>(), polyline_from_json(j.at("polyline")),
               {j.at("window").at("first_seq").get<std::int64_t>(),
                j.at("window").at("last_seq").get<std::int64_t>()},
               trace_from_json(j.at("trace"))};
    if (m.window.last_seq < m.window.first_seq) throw DataError("route: empty window");
    return m;
  });
}

SegmentMsg decode_segment(const std::string& text) {
  return decode_with(text, "segment", [](const json& j) {
    SegmentMsg m;
    m.vehicle_id = j.at("vehicle_id").get<std::string>();
    for (const auto& s : j.at("segments")) {
      m.segments.push_back({polyline_from_json(s.at("polyline")), s.at("level").get<int>(),
                            s.at("length_m").get<double>()});
    }
    m.trace = trace_from_json(j.at("trace"));
    return m;
  });
}

TollMsg decode_toll(const std::string& text) {
  return decode_with(text, "toll", [](const json& j) {
    TollMsg m;
    m.vehicle_id = j.at("vehicle_id").get<std::string>();
    m.increment_micro_eur = j.at("increment_micro_eur").get<MicroEuros>();
    m.cumulative_micro_eur = j.at("cumulative_micro_eur").get<MicroEuros>();
    m.distance_m_total = j.at("distance_m_total").get<double>();
    m.trace = trace_from_json(j.at("trace"));
    return m;
  });
}

}  // namespace tollgrid::services
