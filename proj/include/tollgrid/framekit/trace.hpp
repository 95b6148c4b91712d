#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tollgrid/framekit/clock.hpp"

namespace tollgrid::framekit {

// Pipeline stages, in the order a message passes them.
enum class Stage {
  kEmit,
  kMatcherIn,
  kMatcherOut,
  kPollutionIn,
  kPollutionOut,
  kTollIn,
  kTollOut,
};

inline constexpr std::array<Stage, 7> kAllStages = {
    Stage::kEmit,        Stage::kMatcherIn, Stage::kMatcherOut, Stage::kPollutionIn,
    Stage::kPollutionOut, Stage::kTollIn,   Stage::kTollOut,
};

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct StageStamp {
  Stage stage;
  std::int64_t ts_us;

  bool operator==(const StageStamp&) const = default;
};

// Carried inside every pipeline message so the per-service time of each
// message can be reconstructed from the toll stream alone.
struct TraceContext {
  std::string trace_id;
  std::string vehicle_id;
  std::int64_t seq = 0;
  std::vector<StageStamp> stage_stamps;

  std::optional<std::int64_t> at(Stage stage) const;
  bool has(Stage stage) const { return at(stage).has_value(); }
  // All seven stages present, in pipeline order.
  bool complete() const;

  bool operator==(const TraceContext&) const = default;
};

// 128 random bits as 32 lowercase hex digits.
std::string new_trace_id(std::mt19937_64& rng);

// Appends (stage, now). Throws ContractError if the stage is already stamped.
TraceContext& stamp(TraceContext& ctx, Stage stage, const Clock& clock);

}  // namespace tollgrid::framekit
