#pragma once

#include <stdexcept>
#include <string>

namespace tollgrid {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or invariant on a value handed to an operation.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed wire data.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// Socket-level failure: refused, reset, closed.
class TransportError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Bad input file (network, zones, rates, scenario).
class LoadError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class StartupError : public Error {
 public:
  using Error::Error;
};

}  // namespace tollgrid
