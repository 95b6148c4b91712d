#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "checks_bench.hpp"
#include "test_support.hpp"
#include "tollgrid/bench/harness.hpp"
#include "tollgrid/bench/stats.hpp"

using namespace tollgrid;
using namespace tollgrid::bench;
using framekit::Stage;
namespace fs = std::filesystem;

namespace {

// Toll message whose stages take 1, 2, 3 us with 1 us transport gaps.
services::TollMsg toll(int i, bool complete = true) {
  services::TollMsg m;
  m.vehicle_id = "v000";
  m.trace.trace_id = "t" + std::to_string(i);
  const std::int64_t base = 1000 * i;
  m.trace.stage_stamps = {{Stage::kEmit, base},         {Stage::kMatcherIn, base + 1},
                          {Stage::kMatcherOut, base + 2}, {Stage::kPollutionIn, base + 3},
                          {Stage::kPollutionOut, base + 5}, {Stage::kTollIn, base + 6},
                          {Stage::kTollOut, base + 9}};
  if (!complete) m.trace.stage_stamps.erase(m.trace.stage_stamps.begin() + 4);
  return m;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::path(::testing::TempDir()) / ("tollgrid_" + name);
  fs::remove_all(dir);
  return dir;
}

Scenario fixture_scenario() { return load_scenario(testsupport::fixture("scenario.json")); }

}  // namespace

TEST(Stats, StageLatencyFromTrace) {
  const auto s = to_stage_latency(toll(1));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->matcher_us, 1);
  EXPECT_EQ(s->pollution_us, 2);
  EXPECT_EQ(s->toll_us, 3);
  EXPECT_EQ(s->e2e_us, 9);
  EXPECT_EQ(s->transport_us, 3);
  EXPECT_FALSE(to_stage_latency(toll(2, false)));
}

TEST(Stats, WarmupSkipsFirstMessages) {
  std::vector<services::TollMsg> stream;
  for (int i = 0; i < 60; ++i) stream.push_back(toll(i));
  auto r = collect(stream, {50});
  EXPECT_EQ(r.skipped, 50u);
  ASSERT_EQ(r.samples.size(), 10u);
  EXPECT_EQ(r.samples.front().trace_id, "t50");
  EXPECT_EQ(r.samples.front().arrival_index, 51u);
  r = collect(stream, {0});
  EXPECT_EQ(r.samples.size(), 60u);
  r = collect(stream, {100});
  EXPECT_EQ(r.skipped, 60u);
  EXPECT_TRUE(r.samples.empty());
}

TEST(Stats, IncompleteTracesAreDroppedAfterWarmup) {
  std::vector<services::TollMsg> stream;
  for (int i = 0; i < 60; ++i) stream.push_back(toll(i, i != 3 && i != 55));
  const auto r = collect(stream, {50});
  EXPECT_EQ(r.skipped, 50u);
  EXPECT_EQ(r.dropped_incomplete, 1u);
  EXPECT_EQ(r.samples.size(), 9u);
}

TEST(Stats, PercentileNearestRank) {
  const std::vector<std::int64_t> v = {15, 20, 35, 40, 50};
  const std::span<const std::int64_t> s(v);
  EXPECT_EQ(percentile(s, 0), 15);
  EXPECT_EQ(percentile(s, 5), 15);
  EXPECT_EQ(percentile(s, 30), 20);
  EXPECT_EQ(percentile(s, 40), 20);
  EXPECT_EQ(percentile(s, 50), 35);
  EXPECT_EQ(percentile(s, 100), 50);
  const std::vector<std::int64_t> one = {7};
  EXPECT_EQ(percentile(std::span<const std::int64_t>(one), 99), 7);
  EXPECT_THROW(percentile(std::span<const std::int64_t>(), 50), ContractError);
  EXPECT_THROW(percentile(s, 101), ContractError);
  EXPECT_THROW(percentile(s, -1), ContractError);
}

TEST(Stats, PercentileAgreesWithSortOracle) {
  const auto r = checks::percentile_vs_sort(1000);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Stats, SummarizeOneToHundred) {
  std::vector<std::int64_t> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  const auto s = summarize(v);
  EXPECT_EQ(s.count, 100u);
  EXPECT_DOUBLE_EQ(s.mean, 50.5);
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.max, 100);
  EXPECT_EQ(s.p50, 50);
  EXPECT_EQ(s.p90, 90);
  EXPECT_EQ(s.p95, 95);
  EXPECT_EQ(s.p99, 99);
  EXPECT_THROW(summarize({}), ContractError);
}

TEST(Stats, ReportSharesOfMeanE2e) {
  std::vector<services::TollMsg> stream;
  for (int i = 0; i < 10; ++i) stream.push_back(toll(i));
  const auto r = report(collect(stream, {0}).samples);
  EXPECT_NEAR(r.shares.matcher, 100.0 / 9, 1e-9);
  EXPECT_NEAR(r.shares.pollution, 200.0 / 9, 1e-9);
  EXPECT_NEAR(r.shares.toll, 300.0 / 9, 1e-9);
  EXPECT_NEAR(r.shares.transport, 300.0 / 9, 1e-9);
  EXPECT_NEAR(r.shares.sum(), 100.0, 1e-9);
  EXPECT_EQ(r.e2e.p50, 9);
  EXPECT_THROW(report(std::span<const StageLatency>()), ContractError);
}

TEST(Stats, ZeroLatencySamples) {
  StageLatency s;
  const std::vector<StageLatency> v(3, s);
  const auto r = report(v);
  EXPECT_EQ(r.e2e.max, 0);
  EXPECT_NEAR(r.shares.sum(), 100.0, 1e-9);
}

TEST(Stats, PollutionShareReadBackFromReport) {
  const auto r = checks::pollution_share(temp_dir("share"));
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Stats, CsvLayout) {
  std::vector<services::TollMsg> stream = {toll(1), toll(2)};
  const auto samples = collect(stream, {0}).samples;
  std::ostringstream out;
  write_csv(out, samples);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCsvHeader);
  std::getline(in, line);
  EXPECT_EQ(line, "t1,v000,1,2,3,3,9");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Scenario, ParseAndErrors) {
  const auto s = parse_scenario(nlohmann::json{{"vehicles", 4}, {"interval_ms", 50}, {"seed", 9}});
  EXPECT_EQ(s.vehicles, 4);
  EXPECT_EQ(s.interval_ms, 50);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.skip, 50u);
  EXPECT_TRUE(s.label.empty());
  EXPECT_EQ(parse_scenario(nlohmann::json{{"label", "x"}}).label, "x");
  EXPECT_THROW(parse_scenario(nlohmann::json{{"label", 3}}), DataError);
  EXPECT_THROW(parse_scenario(nlohmann::json{{"vehicles", 0}}), DataError);
  EXPECT_THROW(parse_scenario(nlohmann::json{{"vehicles", "x"}}), DataError);
  EXPECT_THROW(parse_scenario(nlohmann::json::array()), DataError);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), LoadError);
}

TEST(Scenario, FixturePathsResolveNextToFile) {
  const auto s = fixture_scenario();
  EXPECT_EQ(s.vehicles, 10);
  EXPECT_EQ(s.max_messages, 600u);
  EXPECT_TRUE(fs::exists(s.network_path)) << s.network_path;
  EXPECT_TRUE(fs::exists(s.zones_path)) << s.zones_path;
  EXPECT_TRUE(fs::exists(s.rates_path)) << s.rates_path;
}

TEST(Bench, FixtureScenarioEndToEnd) {
  const auto dir = temp_dir("bench");
  const auto r = run_bench(fixture_scenario(), dir);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_FALSE(r.timed_out);
  EXPECT_EQ(r.tolls, r.expected_tolls);
  EXPECT_EQ(r.collected.skipped, 50u);
  EXPECT_GE(r.collected.samples.size(), 500u);
  EXPECT_EQ(r.collected.dropped_incomplete, 0u);
  for (const auto& [name, ok] : r.checks) EXPECT_TRUE(ok) << name;
  EXPECT_LE(r.conservation_rel_error, 1e-6);
  ASSERT_TRUE(r.report);
  EXPECT_NEAR(r.report->shares.sum(), 100.0, 1e-6);
  EXPECT_GT(std::count_if(r.final_cumulative_micro_eur.begin(), r.final_cumulative_micro_eur.end(),
                          [](const auto& kv) { return kv.second > 0; }),
            0);

  ASSERT_TRUE(fs::exists(dir / "report.json"));
  ASSERT_TRUE(fs::exists(dir / "latency.csv"));
  const auto j = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  EXPECT_EQ(j.at("status"), "complete");
  EXPECT_EQ(j.at("config").at("skip"), 50);
  EXPECT_DOUBLE_EQ(j.at("config").at("skip_iterations").get<double>(), 5.0);
  EXPECT_FALSE(j.at("config").at("label").get<std::string>().empty());
  EXPECT_EQ(j.at("network").at("nodes"), 110);
  EXPECT_EQ(j.at("network").at("edges"), 199);
  // Noise-free points lie on the road.
  EXPECT_EQ(r.deviation_count, r.locations_published);
  EXPECT_LT(r.deviation_max_m, 1e-3);
  EXPECT_EQ(j.at("gps_deviation_m").at("count"), r.deviation_count);
  std::ifstream csv(dir / "latency.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line, kCsvHeader);
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, r.collected.samples.size());

  // Same scenario again: the functional outputs repeat exactly.
  const auto again = run_bench(fixture_scenario());
  EXPECT_EQ(again.tolls, r.tolls);
  EXPECT_EQ(again.routes, r.routes);
  EXPECT_EQ(again.final_cumulative_micro_eur, r.final_cumulative_micro_eur);
}

TEST(Bench, ZeroBudgetTimesOut) {
  auto s = fixture_scenario();
  s.max_seconds = 0;
  const auto dir = temp_dir("timeout");
  const auto r = run_bench(s, dir);
  EXPECT_TRUE(r.timed_out);
  EXPECT_EQ(r.exit_code, kExitTimeout);
  const auto j = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  EXPECT_EQ(j.at("status"), "timeout");
  EXPECT_EQ(j.at("exit_code"), kExitTimeout);
}
