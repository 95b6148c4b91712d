#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string_view>
#include <type_traits>
#include <utility>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/clock.hpp"

namespace tollgrid::framekit {

enum class BreakerState { kClosed, kOpen, kHalfOpen };

std::string_view to_string(BreakerState state);

struct BreakerConfig {
  int failure_threshold = 5;
  std::int64_t reset_timeout_ms = 10'000;
};

// Thrown instead of running the operation while the breaker is open, or
// while the single half-open probe is still in flight.
class CircuitOpenError : public Error {
 public:
  CircuitOpenError(BreakerState state, std::int64_t remaining_ms);

  BreakerState state() const { return state_; }
  std::int64_t remaining_ms() const { return remaining_ms_; }

 private:
  BreakerState state_;
  std::int64_t remaining_ms_;
};

struct BreakerSnapshot {
  BreakerState state = BreakerState::kClosed;
  int consecutive_failures = 0;
  std::int64_t opened_at_ms = 0;
};

// Threshold-based circuit breaker counting consecutive failures.
//
//   CLOSED    run op; failure increments the counter and trips to OPEN when
//             it reaches failure_threshold; success resets it to 0.
//   OPEN      reject without running op until reset_timeout_ms has elapsed
//             since opened_at, then admit one probe as HALF_OPEN.
//   HALF_OPEN probe success closes (counter 0); probe failure re-opens with
//             opened_at = now. Other calls are rejected while the probe runs.
//
// An operation fails by throwing; the exception is rethrown after recording.
class CircuitBreaker {
 public:
  explicit CircuitBreaker(BreakerConfig config = {},
                          std::shared_ptr<Clock> clock = system_clock());

  template <typename Op>
  std::invoke_result_t<Op&> call(Op&& op) {
    acquire();
    try {
      if constexpr (std::is_void_v<std::invoke_result_t<Op&>>) {
        op();
        record_success();
      } else {
        auto result = op();
        record_success();
        return result;
      }
    } catch (...) {
      record_failure();
      throw;
    }
  }

  // Low-level protocol behind call(): acquire() throws CircuitOpenError or
  // grants a permit that must be settled by exactly one record_*().
  void acquire();
  void record_success();
  void record_failure();

  BreakerSnapshot snapshot() const;
  BreakerState state() const { return snapshot().state; }
  const BreakerConfig& config() const { return config_; }

 private:
  BreakerConfig config_;
  std::shared_ptr<Clock> clock_;
  mutable std::mutex mu_;
  BreakerSnapshot s_;
  bool probe_in_flight_ = false;
};

}  // namespace tollgrid::framekit
