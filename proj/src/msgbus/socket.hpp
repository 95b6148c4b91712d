#pragma once

// Thin POSIX socket helpers shared by the broker and the client.

#include <cstddef>
#include <cstdint>
#include <span>

#include "tollgrid/msgbus/endpoint.hpp"

namespace tollgrid::msgbus::detail {

// RAII file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& other) noexcept : fd_(other.release()) {}
  Fd& operator=(Fd&& other) noexcept;
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset();
  explicit operator bool() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

// Throws StartupError when the address cannot be bound.
Fd listen_tcp(const Endpoint& ep, std::uint16_t* bound_port);
// Throws TransportError when the connection is refused.
Fd connect_tcp(const Endpoint& ep);

// Writes everything or throws TransportError.
void send_all(int fd, std::span<const std::uint8_t> bytes);
// Returns bytes read, 0 on orderly close, -1 on error.
long recv_some(int fd, std::span<std::uint8_t> buf);
// Waits until fd is readable or timeout_ms elapses. True when readable.
bool wait_readable(int fd, int timeout_ms);

}  // namespace tollgrid::msgbus::detail
