#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "tollgrid/bench/harness.hpp"
#include "tollgrid/error.hpp"

using namespace tollgrid;

int main(int argc, char** argv) {
  CLI::App app{"tollgrid latency benchmark"};
  std::string scenario_path, out = "bench-out";
  app.add_option("--scenario", scenario_path, "scenario JSON")->required();
  app.add_option("--out", out, "output directory");
  CLI11_PARSE(app, argc, argv);

  bench::Scenario sc;
  try {
    sc = bench::load_scenario(scenario_path);
  } catch (const Error& e) {
    std::cerr << "tollgrid-bench: " << e.what() << '\n';
    return 1;
  }
  auto r = bench::run_bench(sc, out);
  std::cout << "tolls " << r.tolls << "/" << r.expected_tolls << ", samples "
            << r.collected.samples.size() << ", elapsed " << std::fixed << std::setprecision(2)
            << r.elapsed_s << " s\n";
  if (r.report) {
    const auto& s = r.report->shares;
    std::cout << "e2e p50 " << r.report->e2e.p50 << " us, p99 " << r.report->e2e.p99 << " us\n"
              << "share of e2e: matcher " << s.matcher << "%, pollution " << s.pollution
              << "%, toll " << s.toll << "%, transport " << s.transport << "%\n";
  }
  for (const auto& [name, ok] : r.checks) std::cout << name << ": " << (ok ? "ok" : "FAILED") << '\n';
  if (r.timed_out) std::cout << "timed out\n";
  std::cout << "report written to " << out << "/report.json\n";
  return r.exit_code;
}
