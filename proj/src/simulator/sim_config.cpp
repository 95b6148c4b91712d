#include "tollgrid/simulator/sim_config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace tollgrid::simulator {

using nlohmann::json;

SimConfig SimConfigPatch::apply_to(SimConfig base) const {
  if (vehicle_count) base.vehicle_count = *vehicle_count;
  if (update_interval_ms) base.update_interval_ms = *update_interval_ms;
  if (gps_noise_m) base.gps_noise_m = *gps_noise_m;
  if (speed_mps) base.speed_mps = *speed_mps;
  return base;
}

std::vector<FieldError> validate(const SimConfig& cfg) {
  std::vector<FieldError> errors;
  if (cfg.vehicle_count < 1) errors.push_back({"vehicle_count", "must be >= 1"});
  if (cfg.update_interval_ms < 10) errors.push_back({"update_interval_ms", "must be >= 10"});
  if (!std::isfinite(cfg.gps_noise_m) || cfg.gps_noise_m < 0) {
    errors.push_back({"gps_noise_m", "must be >= 0"});
  }
  if (!std::isfinite(cfg.speed_mps) || cfg.speed_mps <= 0) {
    errors.push_back({"speed_mps", "must be > 0"});
  }
  return errors;
}

std::vector<FieldError> parse_patch(const json& body, SimConfigPatch& out) {
  std::vector<FieldError> errors;
  out = {};
  if (!body.is_object()) return {{"", "body must be a JSON object"}};
  for (const auto& [key, value] : body.items()) {
    if (key == "vehicle_count") {
      if (!value.is_number_integer()) {
        errors.push_back({key, "must be an integer"});
      } else if (value.get<std::int64_t>() < 1 || value.get<std::int64_t>() > 100'000) {
        errors.push_back({key, "must be in 1..100000"});
      } else {
        out.vehicle_count = value.get<int>();
      }
    } else if (key == "update_interval_ms") {
      if (!value.is_number_integer()) {
        errors.push_back({key, "must be an integer"});
      } else if (value.get<std::int64_t>() < 10) {
        errors.push_back({key, "must be >= 10"});
      } else {
        out.update_interval_ms = value.get<std::int64_t>();
      }
    } else if (key == "gps_noise_m") {
      if (!value.is_number() || value.get<double>() < 0) {
        errors.push_back({key, "must be a number >= 0"});
      } else {
        out.gps_noise_m = value.get<double>();
      }
    } else if (key == "speed_mps") {
      if (!value.is_number() || value.get<double>() <= 0) {
        errors.push_back({key, "must be a number > 0"});
      } else {
        out.speed_mps = value.get<double>();
      }
    } else {
      errors.push_back({key, "unknown field"});
    }
  }
  return errors;
}

json to_json(const SimConfigPatch& patch) {
  json j = json::object();
  if (patch.vehicle_count) j["vehicle_count"] = *patch.vehicle_count;
  if (patch.update_interval_ms) j["update_interval_ms"] = *patch.update_interval_ms;
  if (patch.gps_noise_m) j["gps_noise_m"] = *patch.gps_noise_m;
  if (patch.speed_mps) j["speed_mps"] = *patch.speed_mps;
  return j;
}

json to_json(const SimConfig& cfg) {
  return {{"vehicle_count", cfg.vehicle_count},
          {"update_interval_ms", cfg.update_interval_ms},
          {"gps_noise_m", cfg.gps_noise_m},
          {"seed", cfg.seed},
          {"speed_mps", cfg.speed_mps}};
}

}  // namespace tollgrid::simulator
