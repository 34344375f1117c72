#pragma once

#include <stdexcept>
#include <string>

namespace simcurv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: dimensions, parameter ranges, unknown names, malformed specs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (step underflow, Newton divergence, loss of
/// positive definiteness, non-finite values).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Requested capability is not available for this model or input.
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace simcurv
