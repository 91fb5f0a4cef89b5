#pragma once

#include <stdexcept>
#include <string>

namespace uvesc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Raised when a Lyapunov solve does not yield a positive-definite P.
class NotHurwitzError : public Error {
 public:
  using Error::Error;
};

/// Integration diverged; carries the simulated time at which it was detected.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace uvesc
