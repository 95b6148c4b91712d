#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tollgrid/bench/stats.hpp"

namespace tollgrid::bench {

struct Scenario {
  std::string label;  // free text copied into the report, e.g. what the network stands for
  int vehicles = 10;
  std::int64_t interval_ms = 100;
  double noise_m = 0.0;
  std::uint64_t seed = 1;
  std::size_t skip = 50;
  std::size_t max_messages = 600;  // toll messages to wait for (rounded up to whole ticks)
  double max_seconds = 60.0;

  // Optional inputs; a generated grid and generated zones are used otherwise.
  std::string network_path;
  std::string zones_path;
  std::string rates_path;
  int zone_count = 8;
  double speed_mps = 10.0;
  bool resources = false;  // sample CPU/RSS of this process into resources.csv
};

// Accepts {vehicles, interval_ms, noise_m, seed, skip, max_messages,
// max_seconds} plus label and the optional keys above. Throws DataError.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitStartup = 2;
inline constexpr int kExitTimeout = 3;

struct BenchResult {
  int exit_code = kExitOk;
  bool timed_out = false;
  double elapsed_s = 0.0;

  std::uint64_t locations_published = 0;
  std::size_t routes = 0, segments = 0, tolls = 0;
  std::size_t expected_tolls = 0;

  CollectResult collected;
  std::optional<LatencyReport> report;

  std::map<std::string, std::int64_t> final_cumulative_micro_eur;
  double tolled_distance_m = 0.0;
  double route_length_m = 0.0;
  double conservation_rel_error = 0.0;
  std::map<std::string, bool> checks;  // monotonic_tolls, conservation, completeness, counts

  // Distance from each published GPS point to its nearest road edge.
  std::size_t deviation_count = 0;
  double deviation_mean_m = 0.0, deviation_p95_m = 0.0, deviation_max_m = 0.0;

  nlohmann::json report_json;
};

// Runs broker, the three services, the simulator and a collector in this
// process, all talking over loopback TCP. Writes latency.csv, report.json
// and optionally resources.csv into out_dir when it is non-empty.
BenchResult run_bench(const Scenario& scenario, const std::filesystem::path& out_dir = {});

}  // namespace tollgrid::bench
