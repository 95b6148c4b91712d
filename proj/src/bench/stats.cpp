#include "tollgrid/bench/stats.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace tollgrid::bench {

using framekit::Stage;

std::optional<StageLatency> to_stage_latency(const services::TollMsg& msg) {
  const auto& t = msg.trace;
  if (!t.complete()) return std::nullopt;
  StageLatency s;
  s.trace_id = t.trace_id;
  s.vehicle_id = msg.vehicle_id;
  s.matcher_us = *t.at(Stage::kMatcherOut) - *t.at(Stage::kMatcherIn);
  s.pollution_us = *t.at(Stage::kPollutionOut) - *t.at(Stage::kPollutionIn);
  s.toll_us = *t.at(Stage::kTollOut) - *t.at(Stage::kTollIn);
  s.e2e_us = *t.at(Stage::kTollOut) - *t.at(Stage::kEmit);
  s.transport_us = s.e2e_us - s.matcher_us - s.pollution_us - s.toll_us;
  return s;
}

CollectResult collect(std::span<const services::TollMsg> toll_stream, const WarmupPolicy& policy) {
  CollectResult out;
  for (std::size_t i = 0; i < toll_stream.size(); ++i) {
    if (i < policy.skip_messages) {
      ++out.skipped;
      continue;
    }
    auto s = to_stage_latency(toll_stream[i]);
    if (!s) {
      ++out.dropped_incomplete;
      continue;
    }
    s->arrival_index = i + 1;
    out.samples.push_back(std::move(*s));
  }
  return out;
}

Summary summarize(std::vector<std::int64_t> values) {
  if (values.empty()) throw ContractError("summary of an empty sample");
  std::sort(values.begin(), values.end());
  const std::span<const std::int64_t> v(values);
  Summary s;
  s.count = values.size();
  long double total = 0;
  for (auto x : values) total += x;
  s.mean = static_cast<double>(total / static_cast<long double>(values.size()));
  s.min = values.front();
  s.max = values.back();
  s.p50 = percentile(v, 50);
  s.p90 = percentile(v, 90);
  s.p95 = percentile(v, 95);
  s.p99 = percentile(v, 99);
  return s;
}

LatencyReport report(std::span<const StageLatency> samples) {
  if (samples.empty()) throw ContractError("report needs at least one sample");
  std::vector<std::int64_t> m, p, t, tr, e;
  for (const auto& s : samples) {
    m.push_back(s.matcher_us);
    p.push_back(s.pollution_us);
    t.push_back(s.toll_us);
    tr.push_back(s.transport_us);
    e.push_back(s.e2e_us);
  }
  LatencyReport r;
  r.matcher = summarize(std::move(m));
  r.pollution = summarize(std::move(p));
  r.toll = summarize(std::move(t));
  r.transport = summarize(std::move(tr));
  r.e2e = summarize(std::move(e));
  if (r.e2e.mean > 0.0) {
    r.shares.matcher = 100.0 * r.matcher.mean / r.e2e.mean;
    r.shares.pollution = 100.0 * r.pollution.mean / r.e2e.mean;
    r.shares.toll = 100.0 * r.toll.mean / r.e2e.mean;
    // Remainder, so the shares sum to exactly 100.
    r.shares.transport = 100.0 - r.shares.matcher - r.shares.pollution - r.shares.toll;
  } else {
    r.shares.transport = 100.0;
  }
  return r;
}

nlohmann::json to_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max},
          {"p50", s.p50},     {"p90", s.p90},   {"p95", s.p95}, {"p99", s.p99}};
}

nlohmann::json to_json(const LatencyReport& r) {
  return {{"unit", "us"},
          {"stages",
           {{"matcher", to_json(r.matcher)},
            {"pollution", to_json(r.pollution)},
            {"toll", to_json(r.toll)},
            {"transport", to_json(r.transport)},
            {"e2e", to_json(r.e2e)}}},
          {"share_of_e2e_mean_pct",
           {{"matcher", r.shares.matcher},
            {"pollution", r.shares.pollution},
            {"toll", r.shares.toll},
            {"transport", r.shares.transport}}},
          {"drops", r.drops}};
}

void write_csv(std::ostream& out, std::span<const StageLatency> samples) {
  out << kCsvHeader << '\n';
  for (const auto& s : samples) {
    out << s.trace_id << ',' << s.vehicle_id << ',' << s.matcher_us << ',' << s.pollution_us << ','
        << s.toll_us << ',' << s.transport_us << ',' << s.e2e_us << '\n';
  }
}

}  // namespace tollgrid::bench
