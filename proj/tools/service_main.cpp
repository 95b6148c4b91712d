#include <iostream>

#include <CLI11.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/geo/zone.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/services/runner.hpp"
#include "wait_signal.hpp"

using namespace tollgrid;

int main(int argc, char** argv) {
  CLI::App app{"tollgrid functional service"};
  std::string kind_text, broker = "127.0.0.1:4333", network, zones, rates;
  int health_port = -1;
  app.add_option("--kind", kind_text, "matcher | pollution | toll")->required();
  app.add_option("--broker", broker, "broker host:port");
  app.add_option("--network", network, "road network JSON (matcher)");
  app.add_option("--zones", zones, "pollution zones JSON (pollution)");
  app.add_option("--rates", rates, "rate table JSON (toll)");
  app.add_option("--health-port", health_port, "serve GET /healthz on this port (0 = ephemeral)");
  CLI11_PARSE(app, argc, argv);

  auto kind = services::parse_service_kind(kind_text);
  if (!kind) {
    std::cerr << "tollgrid-service: unknown kind '" << kind_text << "'\n";
    return 1;
  }
  services::ServiceConfig cfg;
  cfg.health_port = health_port;
  try {
    if (*kind == services::ServiceKind::kMapMatcher) {
      if (network.empty()) throw ContractError("--network is required for the matcher");
      cfg.network = std::make_shared<const roadnet::RoadNetwork>(roadnet::load_network(network));
    } else if (*kind == services::ServiceKind::kPollutionMatcher) {
      if (zones.empty()) throw ContractError("--zones is required for the pollution matcher");
      cfg.zones = std::make_shared<const std::vector<geo::PollutionZone>>(geo::load_zones(zones));
    } else if (!rates.empty()) {
      cfg.rates = services::load_rates(rates);
    }
  } catch (const Error& e) {
    std::cerr << "tollgrid-service: " << e.what() << '\n';
    return 1;
  }

  auto signals = block_shutdown_signals();
  try {
    auto svc = services::run_service(*kind, msgbus::parse_endpoint(broker), std::move(cfg));
    std::cout << services::service_name(*kind) << " " << svc->instance_id() << " connected to "
              << broker;
    if (svc->health_port() > 0) std::cout << ", health on port " << svc->health_port();
    std::cout << std::endl;
    wait_for_shutdown(signals);
    svc->stop();
  } catch (const Error& e) {
    std::cerr << "tollgrid-service: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
