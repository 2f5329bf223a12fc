#pragma once

#include <stdexcept>
#include <string>

namespace wgs {

/// Requested quadrature exactness is outside the tabulated range.
class UnsupportedDegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised during global assembly, e.g. for a degenerate cell.
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A saddle-point or Schur block could not be factorized.
class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative eigensolver exhausted its budget. Carries the residuals reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double worst_residual)
      : std::runtime_error(what), worst_residual_(worst_residual) {}
  double worst_residual() const { return worst_residual_; }

 private:
  double worst_residual_;
};

}  // namespace wgs
