#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tollgrid/framekit/clock.hpp"

namespace tollgrid::framekit {

struct ServiceRecord {
  std::string name;
  std::string instance_id;
  std::string address;  // host:port
  std::int64_t registered_at_ms = 0;
  std::int64_t last_heartbeat_ms = 0;
  std::int64_t ttl_ms = 10'000;

  bool expired(std::int64_t now_ms) const { return now_ms - last_heartbeat_ms > ttl_ms; }
};

// In-process service registry with heartbeat TTL and round-robin
// client-side load balancing. Thread-safe.
class ServiceRegistry {
 public:
  explicit ServiceRegistry(std::shared_ptr<Clock> clock = system_clock());

  // Registers (or re-registers) an instance. Timestamps are taken from the
  // registry clock; a re-registration keeps the original registered_at.
  void register_instance(ServiceRecord record);
  // Throws NotFoundError for an unknown or already-expired instance.
  void heartbeat(const std::string& instance_id);
  void deregister(const std::string& instance_id);

  // Live instances of `name`, ordered by registration time.
  std::vector<ServiceRecord> discover(const std::string& name) const;
  // Live instances of every service.
  std::vector<ServiceRecord> all() const;
  // Round-robin over discover(name); nullopt if none are live.
  std::optional<ServiceRecord> pick(const std::string& name);

 private:
  std::vector<ServiceRecord> live_locked(const std::string* name) const;

  std::shared_ptr<Clock> clock_;
  mutable std::mutex mu_;
  std::map<std::string, ServiceRecord> records_;  // by instance_id
  std::map<std::string, std::size_t> cursor_;     // by name
  std::int64_t order_ = 0;
  std::map<std::string, std::int64_t> order_of_;
};

}  // namespace tollgrid::framekit
