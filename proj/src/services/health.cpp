#include "tollgrid/services/health.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"

namespace tollgrid::services {

struct HealthServer::Impl {
  httplib::Server server;
  std::thread thread;
  Probe probe;
};

HealthServer::HealthServer(std::string host, int port, Probe probe)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port) {
  impl_->probe = std::move(probe);
}

HealthServer::~HealthServer() { stop(); }

void HealthServer::start() {
  auto* impl = impl_.get();
  impl->server.Get("/healthz", [impl](const httplib::Request&, httplib::Response& res) {
    res.set_content(impl->probe().dump(), "application/json");
  });
  if (port_ == 0) {
    port_ = impl->server.bind_to_any_port(host_);
    if (port_ <= 0) throw StartupError("health endpoint: cannot bind " + host_);
  } else if (!impl->server.bind_to_port(host_, port_)) {
    throw StartupError("health endpoint: cannot bind " + host_ + ":" + std::to_string(port_));
  }
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
}

void HealthServer::stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

}  // namespace tollgrid::services
