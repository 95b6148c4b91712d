#include <iostream>

#include <CLI11.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/msgbus/broker.hpp"
#include "wait_signal.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tollgrid message broker"};
  std::string bind = "127.0.0.1:4333";
  std::size_t capacity = 10'000;
  app.add_option("--bind", bind, "host:port to listen on");
  app.add_option("--capacity", capacity, "per-subscription buffer (drop oldest)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  auto signals = block_shutdown_signals();
  try {
    auto broker = tollgrid::msgbus::run_broker(tollgrid::msgbus::parse_endpoint(bind), capacity);
    std::cout << "broker listening on " << broker->endpoint().to_string() << std::endl;
    wait_for_shutdown(signals);
    broker->stop();
  } catch (const tollgrid::Error& e) {
    std::cerr << "tollgrid-broker: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
