#pragma once

#include <stdexcept>
#include <string>

namespace qcurv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (r < 0, odd n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested beyond what the profile can supply.
class OrderTooHigh : public Error {
 public:
  OrderTooHigh(int requested, int available)
      : Error("derivative order " + std::to_string(requested) +
              " exceeds available order " + std::to_string(available)) {}
};

/// A sampled profile was evaluated outside its grid.
class OutOfGrid : public Error {
 public:
  using Error::Error;
};

/// A radial integral over [0, inf) cannot be closed with the available
/// decay information.
class TailNotConvergent : public Error {
 public:
  using Error::Error;
};

/// The fixed-point iteration stopped making progress.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or profile description.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcurv
