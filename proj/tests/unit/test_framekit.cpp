#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <thread>

#include "checks_framekit.hpp"
#include "tollgrid/framekit/breaker.hpp"
#include "tollgrid/framekit/log.hpp"
#include "tollgrid/framekit/registry.hpp"
#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/framekit/timeout.hpp"
#include "tollgrid/framekit/trace.hpp"

using namespace tollgrid;
using namespace tollgrid::framekit;

namespace {

void fail_once(CircuitBreaker& b) {
  EXPECT_THROW(b.call([] { throw std::runtime_error("boom"); }), std::runtime_error);
}

}  // namespace

TEST(Breaker, OpensAtThreshold) {
  auto clock = std::make_shared<FakeClock>(0);
  CircuitBreaker b({5, 10'000}, clock);
  for (int i = 0; i < 4; ++i) fail_once(b);
  EXPECT_EQ(b.state(), BreakerState::kClosed);
  fail_once(b);
  EXPECT_EQ(b.state(), BreakerState::kOpen);
}

TEST(Breaker, RejectsWithoutRunningWhileOpen) {
  auto clock = std::make_shared<FakeClock>(0);
  CircuitBreaker b({5, 10'000}, clock);
  for (int i = 0; i < 5; ++i) fail_once(b);
  clock->advance_ms(1);
  bool ran = false;
  try {
    b.call([&] { ran = true; });
    FAIL() << "expected rejection";
  } catch (const CircuitOpenError& e) {
    EXPECT_EQ(e.remaining_ms(), 9'999);
  }
  EXPECT_FALSE(ran);
}

TEST(Breaker, ProbeAfterResetTimeoutCloses) {
  auto clock = std::make_shared<FakeClock>(0);
  CircuitBreaker b({5, 10'000}, clock);
  for (int i = 0; i < 5; ++i) fail_once(b);
  clock->advance_ms(10'001);
  EXPECT_EQ(b.call([] { return 7; }), 7);
  EXPECT_EQ(b.state(), BreakerState::kClosed);
  EXPECT_EQ(b.snapshot().consecutive_failures, 0);
}

TEST(Breaker, FailedProbeReopensWithFreshTimer) {
  auto clock = std::make_shared<FakeClock>(0);
  CircuitBreaker b({1, 100}, clock);
  fail_once(b);
  clock->advance_ms(100);
  fail_once(b);
  EXPECT_EQ(b.state(), BreakerState::kOpen);
  EXPECT_EQ(b.snapshot().opened_at_ms, 100);
  clock->advance_ms(99);
  EXPECT_THROW(b.call([] {}), CircuitOpenError);
}

TEST(Breaker, SingleProbeWhileHalfOpen) {
  auto clock = std::make_shared<FakeClock>(0);
  CircuitBreaker b({1, 10}, clock);
  fail_once(b);
  clock->advance_ms(10);
  b.acquire();  // the probe
  EXPECT_EQ(b.state(), BreakerState::kHalfOpen);
  EXPECT_THROW(b.acquire(), CircuitOpenError);
  b.record_success();
  EXPECT_EQ(b.state(), BreakerState::kClosed);
}

TEST(Breaker, SuccessResetsCounter) {
  CircuitBreaker b({3, 10}, std::make_shared<FakeClock>(0));
  fail_once(b);
  fail_once(b);
  b.call([] {});
  fail_once(b);
  fail_once(b);
  EXPECT_EQ(b.state(), BreakerState::kClosed);
}

TEST(Breaker, RejectsBadConfig) {
  EXPECT_THROW(CircuitBreaker({0, 10}), ContractError);
  EXPECT_THROW(CircuitBreaker({1, -1}), ContractError);
}

TEST(Breaker, MatchesTransitionTableExhaustively) {
  const auto r = checks::breaker_exhaustive(12, 3);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Breaker, MatchesTransitionTableThresholdOne) {
  const auto r = checks::breaker_exhaustive(9, 1);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Retry, FirstAttemptSucceedsWithoutDelay) {
  FakeClock clock(0);
  auto r = retry([] { return 1; }, RetryPolicy{}, clock);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_TRUE(r.delays_ms.empty());
  EXPECT_EQ(clock.now_us(), 0);
}

TEST(Retry, DelaysFollowExponentialScheduleWithinJitter) {
  const auto r = checks::retry_schedule(500);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Retry, ExhaustsAfterMaxAttempts) {
  FakeClock clock(0);
  int calls = 0;
  try {
    retry([&] { ++calls; throw std::runtime_error("down"); }, RetryPolicy{4, 50, 2, 2000, 0.1}, clock);
    FAIL();
  } catch (const RetryExhausted& e) {
    EXPECT_EQ(e.attempts(), 4);
    EXPECT_EQ(e.last_error(), "down");
  }
  EXPECT_EQ(calls, 4);
}

TEST(Retry, DelayCappedAtMax) {
  RetryPolicy p{10, 100, 3, 1000, 0.1};
  FakeClock clock(0);
  std::mt19937_64 rng(1);
  EXPECT_THROW(retry([] { throw std::runtime_error("x"); }, p, clock, rng), RetryExhausted);
  EXPECT_DOUBLE_EQ(p.nominal_delay_ms(2), 100);
  EXPECT_DOUBLE_EQ(p.nominal_delay_ms(3), 300);
  EXPECT_DOUBLE_EQ(p.nominal_delay_ms(9), 1000);
  // 9 sleeps, none above the cap.
  EXPECT_LE(clock.now_us(), 9 * 1'000'000);
}

TEST(Retry, VoidOperation) {
  FakeClock clock(0);
  int calls = 0;
  auto r = retry([&] { if (++calls < 2) throw std::runtime_error("x"); }, RetryPolicy{}, clock);
  EXPECT_EQ(r.attempts, 2);
}

TEST(Timeout, FastOperationReturnsResult) {
  EXPECT_EQ(with_timeout([] {
              std::this_thread::sleep_for(std::chrono::milliseconds(5));
              return 42;
            }, 100),
            42);
}

TEST(Timeout, SlowOperationTimesOut) {
  EXPECT_THROW(with_timeout([] {
                 std::this_thread::sleep_for(std::chrono::milliseconds(200));
                 return 0;
               }, 100),
               TimeoutError);
}

TEST(Timeout, PropagatesOperationError) {
  EXPECT_THROW(with_timeout([]() -> int { throw DataError("bad"); }, 100), DataError);
}

TEST(Timeout, CountsAsBreakerFailure) {
  const auto r = checks::timeout_feeds_breaker();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Registry, RegisterDiscoverExpire) {
  auto clock = std::make_shared<FakeClock>(0);
  ServiceRegistry reg(clock);
  reg.register_instance({"mapmatcher", "m1", "127.0.0.1:1", 0, 0, 10'000});
  EXPECT_EQ(reg.discover("mapmatcher").size(), 1u);
  EXPECT_TRUE(reg.discover("unknown").empty());
  clock->advance_ms(10'001);
  EXPECT_TRUE(reg.discover("mapmatcher").empty());
  EXPECT_THROW(reg.heartbeat("m1"), NotFoundError);
}

TEST(Registry, HeartbeatKeepsAlive) {
  auto clock = std::make_shared<FakeClock>(0);
  ServiceRegistry reg(clock);
  reg.register_instance({"toll", "t1", "", 0, 0, 100});
  for (int i = 0; i < 10; ++i) {
    clock->advance_ms(90);
    reg.heartbeat("t1");
  }
  EXPECT_EQ(reg.discover("toll").size(), 1u);
  EXPECT_THROW(reg.heartbeat("nope"), NotFoundError);
}

TEST(Registry, ThreeLiveOneExpired) {
  auto clock = std::make_shared<FakeClock>(0);
  ServiceRegistry reg(clock);
  reg.register_instance({"svc", "a", "", 0, 0, 1'000});
  clock->advance_ms(600);
  for (auto id : {"b", "c", "d"}) reg.register_instance({"svc", id, "", 0, 0, 1'000});
  clock->advance_ms(500);
  auto live = reg.discover("svc");
  ASSERT_EQ(live.size(), 3u);
  EXPECT_EQ(live[0].instance_id, "b");
  EXPECT_EQ(live[2].instance_id, "d");
}

TEST(Registry, RoundRobinAlternates) {
  ServiceRegistry reg(std::make_shared<FakeClock>(0));
  reg.register_instance({"svc", "a", "", 0, 0, 1'000});
  reg.register_instance({"svc", "b", "", 0, 0, 1'000});
  std::string prev;
  for (int i = 0; i < 10; ++i) {
    auto r = reg.pick("svc");
    ASSERT_TRUE(r);
    EXPECT_NE(r->instance_id, prev);
    prev = r->instance_id;
  }
  EXPECT_FALSE(reg.pick("other"));
}

TEST(Registry, RoundRobinEvenOverThree) {
  ServiceRegistry reg(std::make_shared<FakeClock>(0));
  for (auto id : {"a", "b", "c"}) reg.register_instance({"svc", id, "", 0, 0, 1'000});
  std::map<std::string, int> counts;
  for (int i = 0; i < 9; ++i) ++counts[reg.pick("svc")->instance_id];
  EXPECT_EQ(counts, (std::map<std::string, int>{{"a", 3}, {"b", 3}, {"c", 3}}));
}

TEST(Registry, DeregisterRemoves) {
  ServiceRegistry reg(std::make_shared<FakeClock>(0));
  reg.register_instance({"svc", "a", "", 0, 0, 1'000});
  reg.deregister("a");
  EXPECT_TRUE(reg.all().empty());
}

TEST(Trace, StampsInOrder) {
  FakeClock clock(1'000);
  TraceContext ctx{"id", "v000", 1, {}};
  stamp(ctx, Stage::kEmit, clock);
  EXPECT_EQ(ctx.stage_stamps.size(), 1u);
  for (auto s : {Stage::kMatcherIn, Stage::kMatcherOut}) {
    clock.advance_us(3);
    stamp(ctx, s, clock);
  }
  for (std::size_t i = 1; i < ctx.stage_stamps.size(); ++i) {
    EXPECT_LE(ctx.stage_stamps[i - 1].ts_us, ctx.stage_stamps[i].ts_us);
  }
  EXPECT_FALSE(ctx.complete());
  EXPECT_EQ(*ctx.at(Stage::kMatcherOut), 1'006);
}

TEST(Trace, DuplicateStageRejected) {
  FakeClock clock(0);
  TraceContext ctx;
  stamp(ctx, Stage::kEmit, clock);
  EXPECT_THROW(stamp(ctx, Stage::kEmit, clock), ContractError);
}

TEST(Trace, CompleteNeedsAllSevenInOrder) {
  FakeClock clock(0);
  TraceContext ctx;
  for (auto s : kAllStages) stamp(ctx, s, clock);
  EXPECT_TRUE(ctx.complete());
  std::swap(ctx.stage_stamps[1], ctx.stage_stamps[2]);
  EXPECT_FALSE(ctx.complete());
}

TEST(Trace, StageNamesRoundTrip) {
  for (auto s : kAllStages) EXPECT_EQ(parse_stage(stage_name(s)), s);
  EXPECT_FALSE(parse_stage("bogus"));
}

TEST(Trace, IdsAreHex32) {
  std::mt19937_64 rng(5);
  const auto a = new_trace_id(rng), b = new_trace_id(rng);
  EXPECT_EQ(a.size(), 32u);
  EXPECT_NE(a, b);
  EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(Log, SinkReceivesEveryMessage) {
  std::vector<std::string> seen;
  set_log_sink([&](LogLevel, std::string_view comp, std::string_view msg) {
    seen.push_back(std::string(comp) + ":" + std::string(msg));
  });
  set_log_level(LogLevel::kError);
  log(LogLevel::kDebug, "x", "one");
  log(LogLevel::kError, "y", "two");
  set_log_sink(nullptr);
  set_log_level(LogLevel::kWarn);
  EXPECT_EQ(seen, (std::vector<std::string>{"x:one", "y:two"}));
}
