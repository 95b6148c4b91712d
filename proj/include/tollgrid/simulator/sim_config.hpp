#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tollgrid::simulator {

struct SimConfig {
  int vehicle_count = 10;
  std::int64_t update_interval_ms = 5'000;
  double gps_noise_m = 3.0;
  std::uint64_t seed = 1;
  double speed_mps = 10.0;

  bool operator==(const SimConfig&) const = default;
};

// Partial configuration as carried on topic "sim.config" and accepted by the
// gateway: absent fields keep their current value.
struct SimConfigPatch {
  std::optional<int> vehicle_count;
  std::optional<std::int64_t> update_interval_ms;
  std::optional<double> gps_noise_m;
  std::optional<double> speed_mps;

  SimConfig apply_to(SimConfig base) const;
};

struct FieldError {
  std::string field;
  std::string message;
};

// Empty when valid: vehicle_count >= 1, update_interval_ms >= 10,
// gps_noise_m >= 0, speed_mps > 0.
std::vector<FieldError> validate(const SimConfig& cfg);

// Parses and validates the fields present. Unknown fields and wrong types
// are reported as field errors; an empty error list means success.
std::vector<FieldError> parse_patch(const nlohmann::json& body, SimConfigPatch& out);

nlohmann::json to_json(const SimConfigPatch& patch);
nlohmann::json to_json(const SimConfig& cfg);

}  // namespace tollgrid::simulator
