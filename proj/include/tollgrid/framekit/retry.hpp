#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tollgrid/error.hpp"
#include "tollgrid/framekit/clock.hpp"

namespace tollgrid::framekit {

struct RetryPolicy {
  int max_attempts = 4;
  double base_delay_ms = 50.0;
  double multiplier = 2.0;
  double max_delay_ms = 2'000.0;
  double jitter_fraction = 0.1;

  // Un-jittered delay slept before attempt k (k >= 2).
  double nominal_delay_ms(int attempt) const {
    if (attempt < 2) return 0.0;
    return std::min(base_delay_ms * std::pow(multiplier, attempt - 2), max_delay_ms);
  }
};

// Thrown when every attempt failed. Carries the last error's message.
class RetryExhausted : public Error {
 public:
  RetryExhausted(int attempts, const std::string& last_error)
      : Error("gave up after " + std::to_string(attempts) + " attempts: " + last_error),
        attempts_(attempts),
        last_error_(last_error) {}

  int attempts() const { return attempts_; }
  const std::string& last_error() const { return last_error_; }

 private:
  int attempts_;
  std::string last_error_;
};

template <typename T>
struct RetryResult {
  T value;
  int attempts = 0;
  // One entry per sleep, i.e. attempts - 1 entries.
  std::vector<double> delays_ms;
};

template <typename Op>
using retry_value_t = std::conditional_t<std::is_void_v<std::invoke_result_t<Op&>>,
                                         std::monostate, std::invoke_result_t<Op&>>;

// Runs op until it returns without throwing, sleeping on `clock` between
// attempts with jittered exponential back-off. op must be idempotent.
template <typename Op, typename Rng = std::mt19937_64>
RetryResult<retry_value_t<Op>> retry(Op&& op, const RetryPolicy& policy, Clock& clock,
                                     Rng& rng) {
  if (policy.max_attempts < 1) throw ContractError("retry: max_attempts must be >= 1");
  RetryResult<retry_value_t<Op>> out{};
  std::uniform_real_distribution<double> jitter(-policy.jitter_fraction,
                                                policy.jitter_fraction);
  std::string last_error;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    if (attempt >= 2) {
      double delay = policy.nominal_delay_ms(attempt) * (1.0 + jitter(rng));
      delay = std::min(delay, policy.max_delay_ms);
      out.delays_ms.push_back(delay);
      clock.sleep_for_us(static_cast<std::int64_t>(std::llround(delay * 1000.0)));
    }
    out.attempts = attempt;
    try {
      if constexpr (std::is_void_v<std::invoke_result_t<Op&>>) {
        op();
      } else {
        out.value = op();
      }
      return out;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw RetryExhausted(out.attempts, last_error);
}

template <typename Op>
RetryResult<retry_value_t<Op>> retry(Op&& op, const RetryPolicy& policy, Clock& clock) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  return retry(std::forward<Op>(op), policy, clock, rng);
}

}  // namespace tollgrid::framekit
