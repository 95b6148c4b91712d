#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/services/messages.hpp"

namespace tollgrid::bench {

// Per-message durations in microseconds, reconstructed from trace stamps.
// transport is the remainder, so e2e == matcher + pollution + toll + transport.
struct StageLatency {
  std::string trace_id;
  std::string vehicle_id;
  std::int64_t matcher_us = 0;    // matcher_out - matcher_in
  std::int64_t pollution_us = 0;  // pollution_out - pollution_in
  std::int64_t toll_us = 0;       // toll_out - toll_in
  std::int64_t transport_us = 0;  // e2e - in-service time
  std::int64_t e2e_us = 0;        // toll_out - emit
  std::size_t arrival_index = 0;  // 1-based position in the toll stream
};

struct WarmupPolicy {
  std::size_t skip_messages = 50;
};

// nullopt unless the trace holds all seven stages in order.
std::optional<StageLatency> to_stage_latency(const services::TollMsg& msg);

struct CollectResult {
  std::vector<StageLatency> samples;
  std::size_t skipped = 0;             // warm-up
  std::size_t dropped_incomplete = 0;  // after warm-up, trace incomplete
};

// Skips the first skip_messages messages of the stream (by arrival order,
// complete or not) and converts the rest.
CollectResult collect(std::span<const services::TollMsg> toll_stream, const WarmupPolicy& policy);

// Nearest-rank percentile of an ascending sample: the value at 1-based rank
// ceil(q/100 * n), with q = 0 giving the minimum. Throws ContractError for an
// empty sample or q outside [0, 100].
template <typename T>
T percentile(std::span<const T> sorted, double q) {
  if (sorted.empty()) throw ContractError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 100.0)) throw ContractError("percentile q must be in [0, 100]");
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  std::int64_t min = 0, max = 0, p50 = 0, p90 = 0, p95 = 0, p99 = 0;
};

// Throws ContractError for an empty sample.
Summary summarize(std::vector<std::int64_t> values);

struct StageShares {
  double matcher = 0, pollution = 0, toll = 0, transport = 0;  // percent of mean e2e
  double sum() const { return matcher + pollution + toll + transport; }
};

struct LatencyReport {
  Summary matcher, pollution, toll, transport, e2e;
  StageShares shares;
  std::map<std::string, std::uint64_t> drops;
};

// Throws ContractError with no samples.
LatencyReport report(std::span<const StageLatency> samples);

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const LatencyReport& r);

inline constexpr const char* kCsvHeader =
    "trace_id,vehicle_id,matcher_us,pollution_us,toll_us,transport_us,e2e_us";
void write_csv(std::ostream& out, std::span<const StageLatency> samples);

}  // namespace tollgrid::bench
