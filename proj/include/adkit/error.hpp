#pragma once

#include <stdexcept>
#include <string>

namespace adkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible extents: mismatched elementwise operands, bad matmul inner
/// dimensions, or an assignment whose target does not match its source.
struct ShapeError : Error {
  using Error::Error;
};

/// An arena region is too small for the expression being bound.
struct CapacityError : Error {
  using Error::Error;
};

/// Forward evaluation hit a point outside an operation's real domain.
struct DomainError : Error {
  using Error::Error;
};

/// Invalid construction-time or CLI parameter.
struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace adkit
