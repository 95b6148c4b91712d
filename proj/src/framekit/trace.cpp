#include "tollgrid/framekit/trace.hpp"

#include <cstdio>

#include "tollgrid/error.hpp"

namespace tollgrid::framekit {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kEmit: return "emit";
    case Stage::kMatcherIn: return "matcher_in";
    case Stage::kMatcherOut: return "matcher_out";
    case Stage::kPollutionIn: return "pollution_in";
    case Stage::kPollutionOut: return "pollution_out";
    case Stage::kTollIn: return "toll_in";
    case Stage::kTollOut: return "toll_out";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<std::int64_t> TraceContext::at(Stage stage) const {
  for (const auto& s : stage_stamps) {
    if (s.stage == stage) return s.ts_us;
  }
  return std::nullopt;
}

bool TraceContext::complete() const {
  if (stage_stamps.size() != kAllStages.size()) return false;
  for (std::size_t i = 0; i < kAllStages.size(); ++i) {
    if (stage_stamps[i].stage != kAllStages[i]) return false;
  }
  return true;
}

std::string new_trace_id(std::mt19937_64& rng) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

TraceContext& stamp(TraceContext& ctx, Stage stage, const Clock& clock) {
  if (ctx.has(stage)) {
    throw ContractError("trace " + ctx.trace_id + ": stage " + std::string(stage_name(stage)) +
                        " already stamped");
  }
  ctx.stage_stamps.push_back({stage, clock.now_us()});
  return ctx;
}

}  // namespace tollgrid::framekit
