#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>

#include "tollgrid/error.hpp"

namespace tollgrid::framekit {

class TimeoutError : public Error {
 public:
  explicit TimeoutError(std::int64_t limit_ms)
      : Error("timed out after " + std::to_string(limit_ms) + " ms"), limit_ms_(limit_ms) {}

  std::int64_t limit_ms() const { return limit_ms_; }

 private:
  std::int64_t limit_ms_;
};

// Runs op on a worker thread and waits at most limit_ms for it. On timeout the
// worker is detached and its eventual result discarded, so op must own what
// it touches (capture by value or shared_ptr).
template <typename Op>
std::invoke_result_t<std::decay_t<Op>&> with_timeout(Op&& op, std::int64_t limit_ms) {
  using R = std::invoke_result_t<std::decay_t<Op>&>;
  if (limit_ms <= 0) throw ContractError("with_timeout: limit must be > 0");
  std::packaged_task<R()> task(std::forward<Op>(op));
  auto future = task.get_future();
  std::thread(std::move(task)).detach();
  if (future.wait_for(std::chrono::milliseconds(limit_ms)) != std::future_status::ready) {
    throw TimeoutError(limit_ms);
  }
  return future.get();
}

}  // namespace tollgrid::framekit
