#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tollgrid/error.hpp"
#include "tollgrid/geo/zone_gen.hpp"
#include "tollgrid/roadnet/network.hpp"

using namespace tollgrid;

namespace {

int emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text << '\n';
    return 0;
  }
  std::ofstream f(out);
  if (!(f << text << '\n')) {
    std::cerr << "tollgrid-gen: cannot write " << out << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tollgrid fixture generator"};
  app.require_subcommand(1);

  roadnet::GridSpec grid;
  std::string grid_out;
  auto* g = app.add_subcommand("grid", "jittered grid road network");
  g->add_option("--rows", grid.rows);
  g->add_option("--cols", grid.cols);
  g->add_option("--spacing-deg", grid.spacing_deg);
  g->add_option("--jitter", grid.jitter_fraction, "fraction of spacing");
  g->add_option("--seed", grid.seed);
  g->add_option("--lat", grid.origin.lat, "origin latitude");
  g->add_option("--lon", grid.origin.lon, "origin longitude");
  g->add_option("-o,--out", grid_out);

  std::string network, zones_out;
  int count = 8;
  std::uint64_t zone_seed = 1;
  auto* z = app.add_subcommand("zones", "random non-overlapping rectangular zones");
  z->add_option("--network", network, "place zones over this network's bounding box")->required();
  z->add_option("--count", count);
  z->add_option("--seed", zone_seed);
  z->add_option("-o,--out", zones_out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return emit(roadnet::network_to_json(roadnet::make_grid(grid)), grid_out);
    auto net = roadnet::load_network(network);
    return emit(geo::zones_to_json(geo::generate_rect_zones(net.bbox(), count, zone_seed)), zones_out);
  } catch (const Error& e) {
    std::cerr << "tollgrid-gen: " << e.what() << '\n';
    return 1;
  }
}
