#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tollgrid/framekit/clock.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/services/messages.hpp"
#include "tollgrid/simulator/sim_config.hpp"

namespace tollgrid::simulator {

struct VehicleState {
  std::string vehicle_id;
  std::size_t edge_idx = 0;     // position in RoadNetwork::edges()
  double t = 0.0;               // from -> to
  bool forward = true;          // travelling towards `to`
  double speed_mps = 10.0;
  std::int64_t next_seq = 1;
  std::int64_t since_update_ms = 0;
};

// Deterministic random-walk traffic on a road network. Identical seed,
// configuration sequence and clock schedule give identical updates.
class Simulator {
 public:
  // Throws ContractError for an invalid config or an empty network.
  Simulator(std::shared_ptr<const roadnet::RoadNetwork> net, SimConfig config,
            std::shared_ptr<framekit::Clock> clock = framekit::system_clock());

  // Advances every vehicle by speed * dt along the network (uniform choice of
  // the next edge at a node, no U-turn unless it is a dead end) and emits one
  // update per vehicle whose update interval has elapsed. Positions carry
  // Gaussian noise with sigma gps_noise_m.
  std::vector<services::LocationUpdate> step(std::int64_t dt_ms);

  // Grows by spawning fresh ids at random nodes or shrinks by retiring the
  // highest ids; interval, noise and speed apply from the next step. Throws
  // ContractError (config unchanged) when the result is invalid.
  void apply_config(const SimConfig& config);
  void apply_config(const SimConfigPatch& patch) { apply_config(patch.apply_to(config_)); }

  const SimConfig& config() const { return config_; }
  std::vector<VehicleState> vehicles() const;
  // Noiseless position of a vehicle.
  geo::GeoPoint position(const VehicleState& v) const;

 private:
  void spawn();
  void advance(VehicleState& v, double meters);

  std::shared_ptr<const roadnet::RoadNetwork> net_;
  SimConfig config_;
  std::shared_ptr<framekit::Clock> clock_;
  std::mt19937_64 move_rng_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 trace_rng_;
  std::map<int, VehicleState> vehicles_;  // by numeric id
  int next_index_ = 0;
};

std::string vehicle_id_for(int index);

}  // namespace tollgrid::simulator
