#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tollgrid::msgbus {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 4333;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

// Parses "host:port". Throws ContractError when malformed.
Endpoint parse_endpoint(std::string_view text);

}  // namespace tollgrid::msgbus
