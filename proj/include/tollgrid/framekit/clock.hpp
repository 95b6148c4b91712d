#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace tollgrid::framekit {

// Time source injected into every time-dependent component so tests can
// drive it deterministically.
class Clock {
 public:
  virtual ~Clock() = default;

  // Wall-clock microseconds since the Unix epoch.
  virtual std::int64_t now_us() const = 0;
  virtual void sleep_for_us(std::int64_t us) = 0;

  std::int64_t now_ms() const { return now_us() / 1000; }
  void sleep_for_ms(std::int64_t ms) { sleep_for_us(ms * 1000); }
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_us() const override;
  void sleep_for_us(std::int64_t us) override;
};

// Manually advanced clock. Sleeping advances time instead of blocking.
class FakeClock final : public Clock {
 public:
  explicit FakeClock(std::int64_t start_us = 0) : now_us_(start_us) {}

  std::int64_t now_us() const override { return now_us_.load(); }
  void sleep_for_us(std::int64_t us) override { advance_us(us); }

  void advance_ms(std::int64_t ms) { now_us_ += ms * 1000; }
  void advance_us(std::int64_t us) { now_us_ += us; }

 private:
  std::atomic<std::int64_t> now_us_;
};

std::shared_ptr<Clock> system_clock();

}  // namespace tollgrid::framekit
