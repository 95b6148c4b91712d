#include "tollgrid/framekit/breaker.hpp"

#include <string>

namespace tollgrid::framekit {

std::string_view to_string(BreakerState state) {
  switch (state) {
    case BreakerState::kClosed: return "CLOSED";
    case BreakerState::kOpen: return "OPEN";
    case BreakerState::kHalfOpen: return "HALF_OPEN";
  }
  return "?";
}

CircuitOpenError::CircuitOpenError(BreakerState state, std::int64_t remaining_ms)
    : Error("circuit open, retry in " + std::to_string(remaining_ms) + " ms"),
      state_(state),
      remaining_ms_(remaining_ms) {}

CircuitBreaker::CircuitBreaker(BreakerConfig config, std::shared_ptr<Clock> clock)
    : config_(config), clock_(std::move(clock)) {
  if (config_.failure_threshold < 1 || config_.reset_timeout_ms < 0) {
    throw ContractError("breaker: threshold must be >= 1 and reset timeout >= 0");
  }
}

void CircuitBreaker::acquire() {
  std::lock_guard lock(mu_);
  switch (s_.state) {
    case BreakerState::kClosed:
      return;
    case BreakerState::kOpen: {
      const std::int64_t elapsed = clock_->now_ms() - s_.opened_at_ms;
      if (elapsed < config_.reset_timeout_ms) {
        throw CircuitOpenError(BreakerState::kOpen, config_.reset_timeout_ms - elapsed);
      }
      s_.state = BreakerState::kHalfOpen;
      probe_in_flight_ = true;
      return;
    }
    case BreakerState::kHalfOpen:
      if (probe_in_flight_) throw CircuitOpenError(BreakerState::kHalfOpen, 0);
      probe_in_flight_ = true;
      return;
  }
}

void CircuitBreaker::record_success() {
  std::lock_guard lock(mu_);
  s_.consecutive_failures = 0;
  s_.state = BreakerState::kClosed;
  probe_in_flight_ = false;
}

void CircuitBreaker::record_failure() {
  std::lock_guard lock(mu_);
  ++s_.consecutive_failures;
  if (s_.state == BreakerState::kHalfOpen ||
      s_.consecutive_failures >= config_.failure_threshold) {
    s_.state = BreakerState::kOpen;
    s_.opened_at_ms = clock_->now_ms();
  }
  probe_in_flight_ = false;
}

BreakerSnapshot CircuitBreaker::snapshot() const {
  std::lock_guard lock(mu_);
  return s_;
}

}  // namespace tollgrid::framekit
