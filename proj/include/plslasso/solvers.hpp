#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plslasso/errors.hpp"
#include "plslasso/linalg.hpp"

namespace plslasso {

enum class Method { lasso_ista, ost, pls_direction, v1_ista, v1_dr, v2 };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

//! Shared knobs for all iterative solvers. Defaults follow the benchmark
//! setup; `step_size` is computed from the quadratic's largest eigenvalue
//! when left empty.
struct SolverOptions {
  double lambda = 0.0;              //!< l1 penalty weight
  double mu = 0.0;                  //!< covariance-reward weight (v1 methods)
  double rho = 1.0;                 //!< splitting penalty for the ADMM-style loops
  std::optional<double> step_size;  //!< gradient step; 1/L when absent
  std::size_t max_iter = 10000;
  double tol = 1e-8;                //!< relative-change stopping threshold
  double init_ridge = 1e-6;         //!< relative ridge for the starting point

  //! Throws InvalidInputError on out-of-range values.
  void validate() const;
};

struct FitResult {
  Vector weights;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
  Method method = Method::lasso_ista;
  std::map<std::string, double> extras;  //!< method-specific scalars
};

//! Proximal-gradient Lasso: min 0.5*||Xw - y||^2 + lambda*||w||_1.
FitResult lasso_ista(const Matrix& x, const Vector& y, const SolverOptions& opts);

//! One-step thresholding: keep the k columns with the largest |X^T y| entries
//! (ties favor the lower index) and least-squares fit on that support. Falls
//! back to a ridge-regularized restricted solve when the restricted Gram
//! matrix is singular; the fallback is flagged in extras.
FitResult ost(const Matrix& x, const Vector& y, std::size_t k,
              double init_ridge = 1e-6);

//! First latent direction maximizing covariance with the response:
//! w = X^T y / ||X^T y||, which always has y^T X w > 0.
Vector pls_first_direction(const Matrix& x, const Vector& y);

//! Proximal-gradient solver for the covariance-rewarded Lasso
//! min 0.5*||Xw - y||^2 - (mu/2)*(y^T X w)^2 + lambda*||w||_1,
//! convex for mu <= 1/||y||^2.
FitResult v1_ista(const Matrix& x, const Vector& y, const SolverOptions& opts);

//! Douglas-Rachford splitting for the same objective as v1_ista. Returns
//! the soft-thresholded iterate as weights so zeros are exact.
FitResult v1_dr(const Matrix& x, const Vector& y, const SolverOptions& opts);

//! Inner ADMM of the ratio-objective method: solves
//!   min 0.5*gamma^T X^T X gamma + (lambda/t_l)*||gamma||_1
//!   s.t. y^T X gamma = 1
//! to residuals |y^T X gamma - 1| <= 1e-8 and ||gamma - beta|| <= 1e-8.
//! Throws ConvergenceError with the final residuals on exhaustion.
Vector v2_admm_inner(const Matrix& x, const Vector& y, double lambda, double t_l,
                     const Vector& gamma0, double rho,
                     std::size_t max_iter = 10000, double tol = 1e-8);

//! Scale update of the ratio-objective method: the unique positive root of
//! y_norm_sq*t^3 - t^2 - lambda*gamma_l1 = 0 (equals 1/y_norm_sq when the
//! penalty term vanishes).
double v2_t_update(double lambda, double gamma_l1, double y_norm_sq);

//! Full ratio-objective solver, alternating v2_admm_inner and v2_t_update.
//! Weights are gamma/t; extras carry t, the constraint residuals, and inner
//! iteration counts.
FitResult v2_solve(const Matrix& x, const Vector& y, const SolverOptions& opts);

//! Regularized normal-equations starting point: solves
//! (gram + eps*I) w = xty with eps = init_ridge*trace(gram)/d.
Vector ridge_init(const Matrix& gram_xx, const Vector& xty, double init_ridge);

}  // namespace plslasso
