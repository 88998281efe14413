#pragma once

#include <stdexcept>
#include <string>

namespace droplet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: malformed grids, non-star-shaped curves, bad configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The harmonic solver could not represent the domain, or produced an
/// inconsistent result (non-positive domain integral, non-finite flux).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The contact law was evaluated outside the range it was validated on.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration for the (center, shape) coordinates did not converge.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

}  // namespace droplet
