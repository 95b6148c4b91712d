#pragma once

#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace tollgrid::services {

// Minimal HTTP server answering GET /healthz with the JSON returned by the
// callback. Port 0 picks an ephemeral port.
class HealthServer {
 public:
  using Probe = std::function<nlohmann::json()>;

  HealthServer(std::string host, int port, Probe probe);
  ~HealthServer();
  HealthServer(const HealthServer&) = delete;
  HealthServer& operator=(const HealthServer&) = delete;

  // Throws StartupError when the port cannot be bound.
  void start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_;
};

}  // namespace tollgrid::services
