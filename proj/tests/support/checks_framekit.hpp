#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "checks.hpp"
#include "oracles.hpp"
#include "tollgrid/framekit/breaker.hpp"
#include "tollgrid/framekit/retry.hpp"
#include "tollgrid/framekit/timeout.hpp"

namespace checks {

// Replays every sequence over {S, F, W} of length <= max_len against a real
// breaker driven by a fake clock and against the reference table, comparing
// after every event whether the op ran, the state and the failure count.
inline Outcome breaker_exhaustive(int max_len = 12, int threshold = 3) {
  using tollgrid::framekit::BreakerState;
  constexpr std::int64_t kReset = 10, kWait = 5;  // two waits reach the timeout exactly
  const char alphabet[3] = {'S', 'F', 'W'};
  Outcome out;
  std::uint64_t sequences = 0, mismatches = 0;
  std::string first_bad;
  std::vector<char> seq;
  for (int len = 0; len <= max_len; ++len) {
    std::uint64_t total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    seq.assign(static_cast<std::size_t>(len), 'S');
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t c = code;
      for (int i = 0; i < len; ++i) {
        seq[static_cast<std::size_t>(i)] = alphabet[c % 3];
        c /= 3;
      }
      auto clock = std::make_shared<tollgrid::framekit::FakeClock>(1'000'000);
      tollgrid::framekit::CircuitBreaker breaker({threshold, kReset}, clock);
      oracle::BreakerModel model{threshold, kReset, kWait};
      bool good = true;
      for (char e : seq) {
        bool ran = false;
        if (e == 'W') {
          clock->advance_ms(kWait);
        } else {
          try {
            breaker.call([&] {
              ran = true;
              if (e == 'F') throw std::runtime_error("fail");
            });
          } catch (const tollgrid::framekit::CircuitOpenError&) {
          } catch (const std::runtime_error&) {
          }
        }
        const bool expect_ran = model.apply(e);
        const auto snap = breaker.snapshot();
        const bool open = snap.state == BreakerState::kOpen;
        const bool expect_open = model.state == oracle::BreakerModel::State::kOpen;
        if (ran != expect_ran || open != expect_open || snap.state == BreakerState::kHalfOpen ||
            snap.consecutive_failures != model.failures) {
          good = false;
          break;
        }
      }
      ++sequences;
      if (!good) {
        if (mismatches == 0) first_bad.assign(seq.begin(), seq.end());
        ++mismatches;
      }
    }
  }
  out.ok = mismatches == 0;
  Detail d;
  d << sequences << " sequences, " << mismatches << " mismatches";
  if (!first_bad.empty()) d << " (first: " << first_bad << ")";
  out.detail = d.str();
  return out;
}

// Retry under a fake clock: an op failing three times then succeeding must
// sleep 50, 100, 200 ms within +-10%, and the clock must advance by exactly
// the recorded delays.
inline Outcome retry_schedule(int trials = 500) {
  tollgrid::framekit::RetryPolicy policy{4, 50.0, 2.0, 2'000.0, 0.1};
  const double nominal[3] = {50, 100, 200};
  int bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    tollgrid::framekit::FakeClock clock(0);
    std::mt19937_64 rng(static_cast<std::uint64_t>(trial));
    int calls = 0;
    auto r = tollgrid::framekit::retry(
        [&] {
          if (++calls < 4) throw std::runtime_error("transient");
          return calls;
        },
        policy, clock, rng);
    std::int64_t slept_us = 0;
    bool good = r.attempts == 4 && r.value == 4 && r.delays_ms.size() == 3;
    for (std::size_t i = 0; good && i < 3; ++i) {
      const double dev = std::fabs(r.delays_ms[i] - nominal[i]) / nominal[i];
      worst = std::max(worst, dev);
      good = dev <= 0.1 + 1e-12;
      slept_us += std::llround(r.delays_ms[i] * 1000.0);
    }
    good = good && clock.now_us() == slept_us;
    bad += good ? 0 : 1;
  }
  Detail d;
  d << trials << " trials, worst deviation " << worst * 100 << "%, " << bad << " out of bounds";
  return {bad == 0, d.str()};
}

// A timed-out call inside the breaker counts as one failure.
inline Outcome timeout_feeds_breaker() {
  auto clock = std::make_shared<tollgrid::framekit::FakeClock>(0);
  tollgrid::framekit::CircuitBreaker breaker({2, 1'000}, clock);
  bool timed_out = false;
  try {
    breaker.call([] {
      return tollgrid::framekit::with_timeout(
          [] {
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
            return 1;
          },
          20);
    });
  } catch (const tollgrid::framekit::TimeoutError&) {
    timed_out = true;
  }
  const auto s = breaker.snapshot();
  Detail d;
  d << "timeout raised " << timed_out << ", consecutive failures " << s.consecutive_failures;
  return {timed_out && s.consecutive_failures == 1, d.str()};
}

}  // namespace checks
