#pragma once

#include <stdexcept>
#include <string>

namespace plslasso {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, non-square input, asymmetry beyond tolerance.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid options or arguments (negative lambda, K out of range, NaN input).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Factorization breakdown, inconsistent objective evaluations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Bisection called without a sign change on the bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Iteration cap reached before the requested tolerance. Carries the last
// estimate (spectral norm) or is thrown with residuals in the message (ADMM).
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& msg,
                            double last_estimate = 0.0)
      : Error(msg), last_estimate(last_estimate) {}
  double last_estimate;
};

// mu outside [0, 1/||y||^2]: the quadratic form would not be convex.
class ConvexityError : public Error {
 public:
  using Error::Error;
};

// Objective blow-up detected while iterating (possible at the mu boundary).
class UnboundedObjectiveError : public Error {
 public:
  using Error::Error;
};

// X^T y = 0 (no covariance direction) or y^T X w0 = 0 at initialization.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

// Evaluation at a pole (y^T X w = 0) of the fractional objective.
class PoleError : public Error {
 public:
  using Error::Error;
};

// File and parse failures during dataset ingestion or result emission.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plslasso
