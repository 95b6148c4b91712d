#pragma once

// Services announce themselves to the gateway-hosted registry by publishing
// heartbeats on topic "registry.heartbeat":
//   {"name", "instance_id", "address", "ttl_ms"}
// The gateway refreshes a known instance or registers an unknown one.

#include <string>

#include "tollgrid/framekit/registry.hpp"

namespace tollgrid::services {

std::string encode_heartbeat(const framekit::ServiceRecord& record);
// Throws DataError.
framekit::ServiceRecord decode_heartbeat(const std::string& text);

// Applies one heartbeat to a registry.
void apply_heartbeat(framekit::ServiceRegistry& registry, const framekit::ServiceRecord& record);

// "<name>-<pid>-<random hex>".
std::string make_instance_id(const std::string& name);

}  // namespace tollgrid::services
