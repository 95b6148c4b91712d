#include <iostream>

#include <CLI11.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/gateway/gateway.hpp"
#include "wait_signal.hpp"

using namespace tollgrid;

int main(int argc, char** argv) {
  CLI::App app{"tollgrid API gateway"};
  std::string http = "127.0.0.1:8080", broker = "127.0.0.1:4333", ui;
  app.add_option("--http-bind", http, "host:port for HTTP");
  app.add_option("--broker", broker, "broker host:port");
  app.add_option("--ui", ui, "directory of static dashboard assets, served under /ui");
  CLI11_PARSE(app, argc, argv);

  auto signals = block_shutdown_signals();
  try {
    gateway::GatewayOptions opts;
    opts.http = msgbus::parse_endpoint(http);
    opts.broker = msgbus::parse_endpoint(broker);
    opts.ui_dir = ui;
    gateway::Gateway gw(opts);
    gw.start();
    std::cout << "gateway on http://" << opts.http.host << ":" << gw.http_port() << std::endl;
    wait_for_shutdown(signals);
    gw.stop();
  } catch (const Error& e) {
    std::cerr << "tollgrid-gateway: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
