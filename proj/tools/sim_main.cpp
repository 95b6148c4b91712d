#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/simulator/runner.hpp"
#include "tollgrid/simulator/sim_config.hpp"
#include "wait_signal.hpp"

using namespace tollgrid;

int main(int argc, char** argv) {
  CLI::App app{"tollgrid traffic simulator"};
  std::string broker = "127.0.0.1:4333", network;
  simulator::SimConfig cfg;
  std::int64_t ticks = 0;
  app.add_option("--broker", broker, "broker host:port");
  app.add_option("--network", network, "road network JSON (default: generated grid)");
  app.add_option("--vehicles", cfg.vehicle_count);
  app.add_option("--interval-ms", cfg.update_interval_ms);
  app.add_option("--noise-m", cfg.gps_noise_m);
  app.add_option("--speed-mps", cfg.speed_mps);
  app.add_option("--seed", cfg.seed);
  app.add_option("--ticks", ticks, "stop after this many ticks (0 = run until signalled)");
  CLI11_PARSE(app, argc, argv);

  std::shared_ptr<const roadnet::RoadNetwork> net;
  try {
    simulator::validate(cfg);
    net = std::make_shared<const roadnet::RoadNetwork>(
        network.empty() ? roadnet::make_grid({}) : roadnet::load_network(network));
  } catch (const Error& e) {
    std::cerr << "tollgrid-sim: " << e.what() << '\n';
    return 1;
  }

  auto signals = block_shutdown_signals();
  try {
    simulator::SimRunnerOptions opts;
    opts.max_ticks = ticks;
    simulator::SimRunner runner(net, cfg, msgbus::parse_endpoint(broker), opts);
    runner.start();
    if (ticks > 0) {
      runner.wait();
    } else {
      wait_for_shutdown(signals);
    }
    runner.stop();
    std::cout << "published " << runner.counters().published << " location updates" << std::endl;
  } catch (const Error& e) {
    std::cerr << "tollgrid-sim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
