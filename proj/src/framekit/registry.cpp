#include "tollgrid/framekit/registry.hpp"

#include <algorithm>

#include "tollgrid/error.hpp"

namespace tollgrid::framekit {

ServiceRegistry::ServiceRegistry(std::shared_ptr<Clock> clock) : clock_(std::move(clock)) {}

void ServiceRegistry::register_instance(ServiceRecord record) {
  if (record.name.empty() || record.instance_id.empty()) {
    throw ContractError("registry: name and instance_id are required");
  }
  if (record.ttl_ms <= 0) throw ContractError("registry: ttl_ms must be > 0");
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_->now_ms();
  record.last_heartbeat_ms = now;
  auto it = records_.find(record.instance_id);
  if (it != records_.end() && !it->second.expired(now)) {
    record.registered_at_ms = it->second.registered_at_ms;
  } else {
    record.registered_at_ms = now;
    order_of_[record.instance_id] = order_++;
  }
  records_[record.instance_id] = std::move(record);
}

void ServiceRegistry::heartbeat(const std::string& instance_id) {
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_->now_ms();
  auto it = records_.find(instance_id);
  if (it == records_.end() || it->second.expired(now)) {
    throw NotFoundError("registry: unknown instance " + instance_id);
  }
  it->second.last_heartbeat_ms = now;
}

void ServiceRegistry::deregister(const std::string& instance_id) {
  std::lock_guard lock(mu_);
  records_.erase(instance_id);
  order_of_.erase(instance_id);
}

std::vector<ServiceRecord> ServiceRegistry::live_locked(const std::string* name) const {
  const std::int64_t now = clock_->now_ms();
  std::vector<ServiceRecord> out;
  for (const auto& [id, rec] : records_) {
    if (rec.expired(now)) continue;
    if (name != nullptr && rec.name != *name) continue;
    out.push_back(rec);
  }
  std::sort(out.begin(), out.end(), [this](const ServiceRecord& a, const ServiceRecord& b) {
    if (a.registered_at_ms != b.registered_at_ms) return a.registered_at_ms < b.registered_at_ms;
    return order_of_.at(a.instance_id) < order_of_.at(b.instance_id);
  });
  return out;
}

std::vector<ServiceRecord> ServiceRegistry::discover(const std::string& name) const {
  std::lock_guard lock(mu_);
  return live_locked(&name);
}

std::vector<ServiceRecord> ServiceRegistry::all() const {
  std::lock_guard lock(mu_);
  return live_locked(nullptr);
}

std::optional<ServiceRecord> ServiceRegistry::pick(const std::string& name) {
  std::lock_guard lock(mu_);
  auto live = live_locked(&name);
  if (live.empty()) return std::nullopt;
  std::size_t& cursor = cursor_[name];
  ServiceRecord chosen = live[cursor % live.size()];
  ++cursor;
  return chosen;
}

}  // namespace tollgrid::framekit
