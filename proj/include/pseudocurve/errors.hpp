#pragma once

#include <stdexcept>
#include <string>

namespace pseudocurve {

// Domain errors: the input is outside the operation's domain of validity.
// The CLI maps these to exit code 2.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Convergence errors: an iterative scheme failed to reach its tolerance.
// The CLI maps these to exit code 3.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateBasisError : DomainError {
  using DomainError::DomainError;
};
struct NotOnQuadricError : DomainError {
  using DomainError::DomainError;
};
struct NotAComplexStructureError : DomainError {
  using DomainError::DomainError;
};
struct NotEllipticError : DomainError {
  using DomainError::DomainError;
};
struct NotGraphError : DomainError {
  using DomainError::DomainError;
};
struct NotTotallyRealError : DomainError {
  using DomainError::DomainError;
};
struct MeanDegenerateError : DomainError {
  using DomainError::DomainError;
};
struct RankDeficientError : DomainError {
  using DomainError::DomainError;
};
struct GridTooCoarseError : DomainError {
  using DomainError::DomainError;
};
struct DomainEscapeError : DomainError {
  using DomainError::DomainError;
};
struct ConstraintViolatedError : DomainError {
  using DomainError::DomainError;
};
struct UnknownNameError : DomainError {
  using DomainError::DomainError;
};
struct DegenerateError : DomainError {
  using DomainError::DomainError;
};

struct NoConvergenceError : ConvergenceError {
  double best_residual = 0.0;
  explicit NoConvergenceError(const std::string& msg, double best = 0.0)
      : ConvergenceError(msg), best_residual(best) {}
};
struct TracingFailureError : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};
struct PathInconsistencyError : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};
struct StencilDegenerateError : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};

}  // namespace pseudocurve
