#include "tollgrid/services/registry_wire.hpp"

#include <unistd.h>

#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"

namespace tollgrid::services {

std::string encode_heartbeat(const framekit::ServiceRecord& record) {
  return nlohmann::json{{"name", record.name},
                        {"instance_id", record.instance_id},
                        {"address", record.address},
                        {"ttl_ms", record.ttl_ms}}
      .dump();
}

framekit::ServiceRecord decode_heartbeat(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    framekit::ServiceRecord r;
    r.name = j.at("name").get<std::string>();
    r.instance_id = j.at("instance_id").get<std::string>();
    r.address = j.value("address", "");
    r.ttl_ms = j.value("ttl_ms", std::int64_t{10'000});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("heartbeat: ") + e.what());
  }
}

void apply_heartbeat(framekit::ServiceRegistry& registry, const framekit::ServiceRecord& record) {
  try {
    registry.heartbeat(record.instance_id);
  } catch (const NotFoundError&) {
    registry.register_instance(record);
  }
}

std::string make_instance_id(const std::string& name) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(rng() & 0xffffffffu));
  return name + "-" + std::to_string(::getpid()) + "-" + buf;
}

}  // namespace tollgrid::services
