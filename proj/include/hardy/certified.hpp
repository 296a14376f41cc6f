#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace hardy {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A mesh or pencil could not be built from the given inputs.
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A computed object violates an invariant it must satisfy by construction.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A nonnegative quantity that is either finite, with an absolute error
/// bound, or certified to be infinite.
class Certified {
 public:
  static Certified finite(double value, double error = 0.0) {
    return Certified(value, error, false);
  }
  static Certified divergent() {
    return Certified(std::numeric_limits<double>::infinity(), 0.0, true);
  }

  bool is_divergent() const noexcept { return divergent_; }
  bool is_finite() const noexcept { return !divergent_; }

  double value() const {
    if (divergent_) throw DomainError("value requested from a divergent quantity");
    return value_;
  }
  /// +inf for divergent quantities.
  double value_or_inf() const noexcept { return value_; }
  double error() const noexcept { return error_; }

 private:
  Certified(double v, double e, bool d) : value_(v), error_(e), divergent_(d) {}

  double value_;
  double error_;
  bool divergent_;
};

}  // namespace hardy
