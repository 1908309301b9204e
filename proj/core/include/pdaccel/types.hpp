#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>

namespace pdaccel {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Value returned by extended-real evaluations outside the effective domain.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine exhausted its budget. Carries the last estimate
/// (power iteration) or the last residual norm (linear solvers).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_value, int iterations)
      : Error(what), last_value_(last_value), iterations_(iterations) {}

  double last_value() const noexcept { return last_value_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_value_;
  int iterations_;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class InfeasibleParameters : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdaccel
