#pragma once

#include <cstddef>
#include <optional>

#include "plslasso/linalg.hpp"

namespace plslasso {

//! Summary of first-order optimality for a penalized fit.
struct OptimalityReport {
  double max_kkt_violation = 0.0;
  bool support_sign_ok = true;
  //! Residual of an equality constraint where one applies (ratio-objective
  //! fits); zero for plain penalized fits.
  double constraint_residual = 0.0;
  double objective_value = 0.0;
};

//! 0.5*||Xw - y||^2 + lambda*||w||_1
double objective_lasso(const Matrix& x, const Vector& y, const Vector& w,
                       double lambda);

//! 0.5*||Xw - y||^2 - (mu/2)*(y^T X w)^2 + lambda*||w||_1
double objective_v1(const Matrix& x, const Vector& y, const Vector& w,
                    double lambda, double mu);

//! Ratio objective 0.5*||Xw - y||^2/(y^T X w)^2 + lambda*||w||_1. Evaluated
//! through two algebraically equal forms that must agree to 1e-10 relative;
//! throws PoleError when y^T X w = 0.
double objective_v2(const Matrix& x, const Vector& y, const Vector& w,
                    double lambda);

//! Subgradient optimality report for a (covariance-rewarded) Lasso fit: the
//! smooth gradient must stay within [-lambda, lambda] off the support and
//! equal -lambda*sign(w_j) on it.
OptimalityReport kkt_report(const Matrix& x, const Vector& y, const Vector& w,
                            double lambda,
                            std::optional<double> mu = std::nullopt);

//! Number of entries with |w_i| > rel_tol * max(1, ||w||_inf).
std::size_t cardinality(const Vector& w, double rel_tol = 1e-8);

enum class RefProblem { lasso, v1, v2_inner, v2_full };

struct RefOptions {
  double mu = 0.0;           //!< reward weight for the v1 objective
  double t = 1.0;            //!< scale dividing the penalty in v2's subproblem
  std::size_t steps = 200000;
  double grid_lo = -5.0;
  double grid_hi = 5.0;
  double grid_step = 0.001;
};

struct RefSolution {
  Vector weights;
  bool stabilized = false;  //!< false when the step budget ran out while still improving
  double objective = 0.0;
};

//! Slow independent solvers used as test oracles: a dense grid scan for
//! d <= 2 and a diminishing-step (projected) subgradient method otherwise
//! (d <= 50). Deterministic; accuracy target ~1e-4 in objective.
RefSolution reference_solve(RefProblem problem, const Matrix& x, const Vector& y,
                            double lambda, const RefOptions& ref = {});

}  // namespace plslasso
