#pragma once

#include <stdexcept>
#include <string>

namespace qvdp {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1; anything else escaping a kernel is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A series or iteration exceeded its term/iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A hypergeometric denominator parameter is a non-positive integer.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// The Fock-space truncation is too small for the requested accuracy.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A linear system that should have a one-dimensional kernel has a larger one.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// The k=0 zero mode could not be identified below the threshold.
class ZeroModeError : public Error {
 public:
  using Error::Error;
};

/// Observable variance is numerically zero, so the signal-to-noise ratio is undefined.
class ZeroVarianceError : public Error {
 public:
  using Error::Error;
};

/// A fit or classification needs more usable data points.
class InsufficientPointsError : public Error {
 public:
  using Error::Error;
};

/// A log-log fit received a value <= 0.
class NonPositiveValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace qvdp
