#pragma once

#include <stdexcept>
#include <string>

namespace framekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (non-finite entries, empty sequences, bad tolerances).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel did not converge, or two computational routes disagree.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The vectors span only {0}; bounds, duals and projections onto the span are undefined.
class DegenerateSpan : public Error {
 public:
  using Error::Error;
};

class NotTight : public Error {
 public:
  using Error::Error;
};

/// A generator spec that cannot be realized (e.g. a rank-deficient frame in C^1).
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace framekit
