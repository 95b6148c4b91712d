#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "tollgrid/msgbus/broker.hpp"
#include "tollgrid/msgbus/client.hpp"
#include "tollgrid/roadnet/network.hpp"
#include "tollgrid/simulator/runner.hpp"
#include "tollgrid/simulator/simulator.hpp"

using namespace tollgrid;
using namespace tollgrid::simulator;
using namespace std::chrono_literals;
using framekit::FakeClock;
using testsupport::eventually;

namespace {

constexpr double kMetresPerDegree = 6'371'000.0 * geo::kPi / 180.0;

// One north-south edge exactly 100 m long.
std::shared_ptr<const roadnet::RoadNetwork> hundred_metres() {
  return std::make_shared<roadnet::RoadNetwork>(
      roadnet::RoadNetwork({{1, {0, 0}}, {2, {100.0 / kMetresPerDegree, 0}}}, {{1, 1, 2, 0}}));
}

std::shared_ptr<const roadnet::RoadNetwork> grid() {
  static auto net = std::make_shared<const roadnet::RoadNetwork>(
      roadnet::load_network(testsupport::fixture("grid.json")));
  return net;
}

SimConfig config(int vehicles, std::int64_t interval_ms, double noise = 0.0, std::uint64_t seed = 7) {
  SimConfig c;
  c.vehicle_count = vehicles;
  c.update_interval_ms = interval_ms;
  c.gps_noise_m = noise;
  c.seed = seed;
  return c;
}

std::set<std::string> ids(const Simulator& sim) {
  std::set<std::string> out;
  for (const auto& v : sim.vehicles()) out.insert(v.vehicle_id);
  return out;
}

}  // namespace

TEST(Simulator, ZeroStepEmitsNothing) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(grid(), config(10, 100), clock);
  const auto before = sim.vehicles();
  EXPECT_TRUE(sim.step(0).empty());
  const auto after = sim.vehicles();
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i].t, after[i].t);
}

TEST(Simulator, MovesSpeedTimesDt) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(hundred_metres(), config(1, 5000), clock);
  const auto updates = sim.step(5000);
  ASSERT_EQ(updates.size(), 1u);
  const auto v = sim.vehicles().at(0);
  EXPECT_NEAR(v.t, 0.5, 1e-9);
  EXPECT_NEAR(updates[0].point.lat * kMetresPerDegree, 50.0, 1e-6);
  EXPECT_EQ(updates[0].seq, 1);
  EXPECT_TRUE(updates[0].trace.has(framekit::Stage::kEmit));
  EXPECT_EQ(updates[0].trace.vehicle_id, updates[0].vehicle_id);
}

TEST(Simulator, UpdatesFollowTheInterval) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(grid(), config(3, 300), clock);
  std::size_t n = 0;
  for (int i = 0; i < 30; ++i) n += sim.step(100).size();  // 3000 ms
  EXPECT_EQ(n, 3u * 10u);
}

TEST(Simulator, Deterministic) {
  auto run = [] {
    auto clock = std::make_shared<FakeClock>(1'000'000);
    Simulator sim(grid(), config(5, 100, 3.0, 42), clock);
    std::vector<std::string> out;
    for (int i = 0; i < 50; ++i) {
      clock->advance_ms(100);
      for (auto& u : sim.step(100)) out.push_back(services::encode(u));
    }
    return out;
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.size(), 250u);
  EXPECT_EQ(a, b);
}

TEST(Simulator, SeqIncreasesPerVehicle) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(grid(), config(4, 100), clock);
  std::map<std::string, std::int64_t> last;
  for (int i = 0; i < 20; ++i)
    for (const auto& u : sim.step(100)) {
      EXPECT_EQ(u.seq, last[u.vehicle_id] + 1);
      last[u.vehicle_id] = u.seq;
    }
}

TEST(Simulator, GrowingKeepsExistingVehicles) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(grid(), config(10, 100), clock);
  for (int i = 0; i < 5; ++i) sim.step(100);
  const auto before = sim.vehicles();
  sim.apply_config(SimConfigPatch{15, {}, {}, {}});
  const auto after = sim.vehicles();
  ASSERT_EQ(after.size(), 15u);
  for (const auto& b : before) {
    auto it = std::find_if(after.begin(), after.end(), [&](const auto& a) { return a.vehicle_id == b.vehicle_id; });
    ASSERT_NE(it, after.end());
    EXPECT_EQ(it->t, b.t);
    EXPECT_EQ(it->edge_idx, b.edge_idx);
    EXPECT_EQ(it->next_seq, b.next_seq);
  }
}

TEST(Simulator, ShrinkRetiresHighestAndIdsAreNotReused) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(grid(), config(5, 100), clock);
  sim.apply_config(SimConfigPatch{3, {}, {}, {}});
  const auto shrunk = ids(sim);
  EXPECT_EQ(shrunk, (std::set<std::string>{vehicle_id_for(0), vehicle_id_for(1), vehicle_id_for(2)}));
  sim.apply_config(SimConfigPatch{5, {}, {}, {}});
  const auto regrown = ids(sim);
  EXPECT_EQ(regrown.size(), 5u);
  EXPECT_FALSE(regrown.count(vehicle_id_for(3)));
  EXPECT_TRUE(regrown.count(vehicle_id_for(5)));
}

TEST(Simulator, ShorterIntervalGivesMoreUpdates) {
  auto clock = std::make_shared<FakeClock>();
  Simulator sim(grid(), config(10, 5000), clock);
  auto count = [&](int ms) {
    std::size_t n = 0;
    for (int t = 0; t < ms; t += 100) n += sim.step(100).size();
    return n;
  };
  const auto slow = count(10'000);
  sim.apply_config(SimConfigPatch{{}, 500, {}, {}});
  const auto fast = count(10'000);
  EXPECT_EQ(slow, 20u);
  EXPECT_EQ(fast, 200u);
}

TEST(Simulator, RejectsInvalidConfig) {
  auto clock = std::make_shared<FakeClock>();
  EXPECT_THROW(Simulator(grid(), config(0, 100), clock), ContractError);
  Simulator sim(grid(), config(2, 100), clock);
  EXPECT_THROW(sim.apply_config(SimConfigPatch{0, {}, {}, {}}), ContractError);
  EXPECT_EQ(sim.config().vehicle_count, 2);
  EXPECT_EQ(sim.vehicles().size(), 2u);
}

TEST(SimConfig, ParsePatch) {
  SimConfigPatch p;
  EXPECT_TRUE(parse_patch(nlohmann::json{{"vehicle_count", 15}, {"update_interval_ms", 1000}}, p).empty());
  EXPECT_EQ(p.vehicle_count, 15);
  EXPECT_EQ(p.update_interval_ms, 1000);
  EXPECT_FALSE(p.gps_noise_m);
  const auto cfg = p.apply_to(SimConfig{});
  EXPECT_EQ(cfg.vehicle_count, 15);
  EXPECT_EQ(cfg.gps_noise_m, 3.0);
  EXPECT_EQ(to_json(p), (nlohmann::json{{"vehicle_count", 15}, {"update_interval_ms", 1000}}));
}

TEST(SimConfig, ParsePatchErrors) {
  auto errors_for = [](const nlohmann::json& body) {
    SimConfigPatch p;
    std::vector<std::string> fields;
    for (const auto& e : parse_patch(body, p)) fields.push_back(e.field);
    return fields;
  };
  EXPECT_EQ(errors_for({{"vehicle_count", 0}}), std::vector<std::string>{"vehicle_count"});
  EXPECT_EQ(errors_for({{"vehicle_count", "ten"}}), std::vector<std::string>{"vehicle_count"});
  EXPECT_EQ(errors_for({{"update_interval_ms", 5}}), std::vector<std::string>{"update_interval_ms"});
  EXPECT_EQ(errors_for({{"gps_noise_m", -1}}), std::vector<std::string>{"gps_noise_m"});
  EXPECT_EQ(errors_for({{"speed_mps", 0}}), std::vector<std::string>{"speed_mps"});
  EXPECT_EQ(errors_for({{"colour", "red"}}), std::vector<std::string>{"colour"});
  EXPECT_EQ(errors_for({{"vehicle_count", 0}, {"speed_mps", 0}}).size(), 2u);
}

TEST(SimConfig, Validate) {
  EXPECT_TRUE(validate(SimConfig{}).empty());
  SimConfig c;
  c.update_interval_ms = 9;
  ASSERT_EQ(validate(c).size(), 1u);
  EXPECT_EQ(validate(c)[0].field, "update_interval_ms");
}

TEST(SimRunner, PublishesAndAppliesConfig) {
  auto broker = msgbus::run_broker({"127.0.0.1", 0});
  msgbus::BusClient observer(broker->endpoint());
  auto updates = observer.subscribe(msgbus::topics::kLocationUpdate);
  auto results = observer.subscribe(msgbus::topics::kSimConfigResult);

  SimRunnerOptions opts;
  opts.tick_ms = 20;
  SimRunner runner(grid(), config(3, 20), broker->endpoint(), opts);
  runner.start();
  ASSERT_TRUE(eventually([&] { return updates->size() >= 9; }));
  const auto first = services::decode_location_update(updates->pop(1s)->payload);
  EXPECT_EQ(first.seq, 1);

  observer.publish(msgbus::topics::kSimConfig, R"({"vehicle_count":6})");
  auto ack = results->pop(5s);
  ASSERT_TRUE(ack);
  auto j = nlohmann::json::parse(ack->payload);
  EXPECT_TRUE(j.at("accepted").get<bool>());
  EXPECT_EQ(j.at("config").at("vehicle_count"), 6);
  EXPECT_EQ(runner.vehicle_count(), 6u);

  observer.publish(msgbus::topics::kSimConfig, R"({"vehicle_count":0})");
  ack = results->pop(5s);
  ASSERT_TRUE(ack);
  j = nlohmann::json::parse(ack->payload);
  EXPECT_FALSE(j.at("accepted").get<bool>());
  EXPECT_EQ(j.at("errors").at(0).at("field"), "vehicle_count");
  EXPECT_EQ(runner.vehicle_count(), 6u);

  observer.publish(msgbus::topics::kSimConfig, "not json");
  ack = results->pop(5s);
  ASSERT_TRUE(ack);
  EXPECT_FALSE(nlohmann::json::parse(ack->payload).at("accepted").get<bool>());

  const auto c = runner.counters();
  EXPECT_EQ(c.configs_applied, 1u);
  EXPECT_EQ(c.configs_rejected, 2u);
  EXPECT_GT(c.published, 0u);
  runner.stop();
  broker->stop();
}

TEST(SimRunner, MaxTicksStops) {
  auto broker = msgbus::run_broker({"127.0.0.1", 0});
  SimRunnerOptions opts;
  opts.tick_ms = 100;
  opts.max_ticks = 5;
  opts.paced = false;
  SimRunner runner(grid(), config(4, 100), broker->endpoint(), opts);
  runner.start();
  runner.wait();
  EXPECT_EQ(runner.counters().ticks, 5u);
  EXPECT_EQ(runner.counters().published, 20u);
  runner.stop();
  broker->stop();
}

TEST(SimRunner, StartFailsWithoutBroker) {
  SimRunnerOptions opts;
  opts.connect_retry = {2, 5.0, 2.0, 10.0, 0.0};
  SimRunner runner(grid(), config(1, 100), {"127.0.0.1", 1}, opts);
  EXPECT_THROW(runner.start(), StartupError);
}
