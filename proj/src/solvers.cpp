#include "plslasso/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace plslasso {

namespace {

void check_problem(const Matrix& x, const Vector& y, const char* who) {
  if (x.rows() != y.size()) {
    std::ostringstream os;
    os << who << ": X has " << x.rows() << " rows but y has " << y.size()
       << " entries";
    throw DimensionError(os.str());
  }
  if (x.cols() == 0) throw InvalidInputError(std::string(who) + ": X has no columns");
  if (!all_finite(x) || !all_finite(y))
    throw InvalidInputError(std::string(who) + ": non-finite input");
}

// mu is only admissible up to 1/||y||^2; a hair of slack keeps the exact
// boundary usable when 1/||y||^2 is computed in floating point.
void check_mu(double mu, double y_norm_sq, const char* who) {
  if (!(mu >= 0.0))
    throw InvalidInputError(std::string(who) + ": mu must be nonnegative");
  if (mu * y_norm_sq > 1.0 + 1e-12) {
    std::ostringstream os;
    os << who << ": objective is convex only for mu <= 1/||y||^2, got"
       << " mu*||y||^2 = " << mu * y_norm_sq;
    throw ConvexityError(os.str());
  }
}

double rel_change(const Vector& next, const Vector& prev) {
  double num = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double d = next[i] - prev[i];
    num += d * d;
  }
  return std::sqrt(num) / (1.0 + norm2(prev));
}

void check_blowup(double f, double f0, const char* who) {
  if (!std::isfinite(f) || std::abs(f) > 10.0 * (std::abs(f0) + 1.0)) {
    std::ostringstream os;
    os << who << ": objective magnitude grew past 10x its starting value"
       << " (from " << f0 << " to " << f << "); the problem is unbounded"
       << " below for this mu/lambda combination";
    throw UnboundedObjectiveError(os.str());
  }
}

double trace_of(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

// Quadratic-plus-l1 value 0.5 w'Qw - c'w + const + lambda*||w||_1 with the
// Q-product supplied by the caller so gradient and objective share one matvec.
double penalized_quadratic(const Vector& w, const Vector& qw, const Vector& c,
                           double constant, double lambda) {
  return 0.5 * dot(w, qw) - dot(c, w) + constant + lambda * norm1(w);
}

FitResult null_solution(std::size_t d, double half_y_sq, Method method) {
  FitResult r;
  r.weights.assign(d, 0.0);
  r.converged = true;
  r.iterations = 0;
  r.objective_trace = {half_y_sq};
  r.method = method;
  return r;
}

// Proximal gradient on 0.5 w'Qw - c'w + lambda*||w||_1 where Q folds the
// covariance reward (Q = X'X - mu*(X'y)(X'y)'); mu = 0 recovers the Lasso.
FitResult fit_ista(const Matrix& x, const Vector& y, const SolverOptions& opts,
                   double mu, Method method, const char* who) {
  check_problem(x, y, who);
  opts.validate();
  const double y_sq = dot(y, y);
  check_mu(mu, y_sq, who);

  const Matrix g = gram(x);
  const Vector c = matvec_transposed(x, y);
  const std::size_t d = x.cols();

  // the zero vector is optimal whenever the gradient at zero fits under the
  // penalty; returning it directly keeps the zeros exact at the threshold
  if (norm_inf(c) <= opts.lambda) {
    FitResult r = null_solution(d, 0.5 * y_sq, method);
    if (method != Method::lasso_ista) r.extras["mu"] = mu;
    return r;
  }

  Matrix q_store;
  const Matrix* q = &g;
  if (mu > 0.0) {
    q_store = g;
    add_scaled_outer(q_store, c, -mu);
    q = &q_store;
  }

  double step;
  if (opts.step_size) {
    step = *opts.step_size;
  } else {
    const double lip = spectral_norm_sym(*q);
    if (lip == 0.0)
      throw UnboundedObjectiveError(
          std::string(who) + ": quadratic term vanished but the penalty cannot"
                             " contain the linear term");
    // slight deflation keeps the step strictly below 1/L even though the
    // power iteration only certifies L from below
    step = 1.0 / (lip * (1.0 + 1e-6));
  }

  Vector w = ridge_init(g, c, opts.init_ridge);
  Vector qw = matvec(*q, w);
  const double f0 = penalized_quadratic(w, qw, c, 0.5 * y_sq, opts.lambda);

  FitResult r;
  r.method = method;
  r.objective_trace.reserve(std::min<std::size_t>(opts.max_iter + 1, 20000));
  r.objective_trace.push_back(f0);

  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    Vector w_next(d);
    for (std::size_t i = 0; i < d; ++i)
      w_next[i] = soft_threshold(w[i] - step * (qw[i] - c[i]),
                                 opts.lambda * step);
    qw = matvec(*q, w_next);
    const double f =
        penalized_quadratic(w_next, qw, c, 0.5 * y_sq, opts.lambda);
    r.objective_trace.push_back(f);
    check_blowup(f, f0, who);
    const double delta = rel_change(w_next, w);
    w = std::move(w_next);
    if (delta < opts.tol) {
      r.converged = true;
      r.iterations = k + 1;
      break;
    }
  }
  if (!r.converged) r.iterations = opts.max_iter;
  r.weights = std::move(w);
  r.extras["step_size"] = step;
  if (method != Method::lasso_ista) r.extras["mu"] = mu;
  return r;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::lasso_ista: return "lasso_ista";
    case Method::ost: return "ost";
    case Method::pls_direction: return "pls_direction";
    case Method::v1_ista: return "v1_ista";
    case Method::v1_dr: return "v1_dr";
    case Method::v2: return "v2";
  }
  throw InvalidInputError("to_string: unknown method value");
}

Method method_from_string(const std::string& name) {
  if (name == "lasso_ista" || name == "lasso") return Method::lasso_ista;
  if (name == "ost") return Method::ost;
  if (name == "pls_direction") return Method::pls_direction;
  if (name == "v1_ista") return Method::v1_ista;
  if (name == "v1_dr") return Method::v1_dr;
  if (name == "v2") return Method::v2;
  throw InvalidInputError(
      "unknown method '" + name +
      "' (expected lasso_ista, ost, pls_direction, v1_ista, v1_dr, or v2)");
}

void SolverOptions::validate() const {
  if (!(lambda >= 0.0))
    throw InvalidInputError("SolverOptions: lambda must be nonnegative");
  if (!(mu >= 0.0))
    throw InvalidInputError("SolverOptions: mu must be nonnegative");
  if (!(rho > 0.0))
    throw InvalidInputError("SolverOptions: rho must be positive");
  if (step_size && !(*step_size > 0.0))
    throw InvalidInputError("SolverOptions: step_size must be positive");
  if (max_iter == 0)
    throw InvalidInputError("SolverOptions: max_iter must be at least 1");
  if (!(tol > 0.0))
    throw InvalidInputError("SolverOptions: tol must be positive");
  if (!(init_ridge >= 0.0))
    throw InvalidInputError("SolverOptions: init_ridge must be nonnegative");
}

Vector ridge_init(const Matrix& gram_xx, const Vector& xty, double init_ridge) {
  if (gram_xx.rows() != gram_xx.cols() || gram_xx.rows() != xty.size())
    throw DimensionError("ridge_init: dimension mismatch");
  if (!(init_ridge >= 0.0))
    throw InvalidInputError("ridge_init: init_ridge must be nonnegative");
  const std::size_t d = gram_xx.rows();
  Matrix a = gram_xx;
  add_scaled_identity(a, init_ridge * trace_of(gram_xx) / static_cast<double>(d));
  return solve_spd(a, xty);
}

FitResult lasso_ista(const Matrix& x, const Vector& y, const SolverOptions& opts) {
  if (opts.mu != 0.0)
    throw InvalidInputError(
        "lasso_ista: mu is not used by this method; leave it at 0 or use a"
        " v1 method");
  return fit_ista(x, y, opts, 0.0, Method::lasso_ista, "lasso_ista");
}

FitResult v1_ista(const Matrix& x, const Vector& y, const SolverOptions& opts) {
  return fit_ista(x, y, opts, opts.mu, Method::v1_ista, "v1_ista");
}

FitResult ost(const Matrix& x, const Vector& y, std::size_t k,
              double init_ridge) {
  check_problem(x, y, "ost");
  const std::size_t d = x.cols();
  if (k < 1 || k > d) {
    std::ostringstream os;
    os << "ost: k must be between 1 and " << d << ", got " << k;
    throw InvalidInputError(os.str());
  }
  if (!(init_ridge >= 0.0))
    throw InvalidInputError("ost: init_ridge must be nonnegative");

  const Vector z = matvec_transposed(x, y);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  // stable sort keeps the lower index in front on exact magnitude ties
  std::stable_sort(order.begin(), order.end(), [&z](std::size_t a, std::size_t b) {
    return std::abs(z[a]) > std::abs(z[b]);
  });
  std::vector<std::size_t> support(order.begin(), order.begin() + k);
  std::sort(support.begin(), support.end());

  Matrix xs(x.rows(), k);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) xs(i, j) = x(i, support[j]);
  const Matrix gs = gram(xs);
  const Vector bs = matvec_transposed(xs, y);

  Vector ws;
  bool fallback = false;
  try {
    ws = CholeskyFactor(gs).solve(bs);
  } catch (const NumericalError&) {
    fallback = true;
    Matrix gr = gs;
    add_scaled_identity(gr, init_ridge * trace_of(gs) / static_cast<double>(k));
    ws = solve_spd(gr, bs);
  }

  FitResult r;
  r.weights.assign(d, 0.0);
  for (std::size_t j = 0; j < k; ++j) r.weights[support[j]] = ws[j];
  r.converged = true;
  r.iterations = 1;
  r.method = Method::ost;
  const Vector fitted = matvec(x, r.weights);
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = fitted[i] - y[i];
    rss += e * e;
  }
  r.objective_trace = {0.5 * rss};
  r.extras["k"] = static_cast<double>(k);
  r.extras["ridge_fallback"] = fallback ? 1.0 : 0.0;
  return r;
}

Vector pls_first_direction(const Matrix& x, const Vector& y) {
  check_problem(x, y, "pls_first_direction");
  Vector c = matvec_transposed(x, y);
  const double nc = norm2(c);
  if (nc == 0.0)
    throw DegenerateDirectionError(
        "pls_first_direction: X^T y = 0, no covariance direction exists");
  for (double& v : c) v /= nc;
  return c;  // y^T X (c/||c||) = ||c|| > 0, so no sign flip is ever needed
}

FitResult v1_dr(const Matrix& x, const Vector& y, const SolverOptions& opts) {
  const char* who = "v1_dr";
  check_problem(x, y, who);
  opts.validate();
  const double y_sq = dot(y, y);
  const double mu = opts.mu;
  check_mu(mu, y_sq, who);

  const Matrix g = gram(x);
  const Vector c = matvec_transposed(x, y);
  const std::size_t d = x.cols();

  if (norm_inf(c) <= opts.lambda) {
    FitResult r = null_solution(d, 0.5 * y_sq, Method::v1_dr);
    r.extras["mu"] = mu;
    return r;
  }

  Matrix q = g;
  if (mu > 0.0) add_scaled_outer(q, c, -mu);

  // rho plays against the curvature of Q inside every (Q + rho I) solve, so it
  // only acts like a dimensionless knob on a unit-scale quadratic. Scaling Q,
  // c, and lambda by a common factor multiplies the objective by that factor
  // and moves no minimizer, so iterate on the normalized instance and map the
  // recorded objective values back at the end.
  const double q_norm = spectral_norm_sym(q);
  const double unit = q_norm > 0.0 ? 1.0 / q_norm : 1.0;
  if (unit != 1.0) {
    double* qd = q.data();
    for (std::size_t i = 0; i < d * d; ++i) qd[i] *= unit;
  }
  const Vector c_s = scaled(c, unit);
  const double lambda_s = opts.lambda * unit;
  const double tail_s = 0.5 * y_sq * unit;

  Matrix shifted = q;
  add_scaled_identity(shifted, opts.rho);
  const CholeskyFactor chol(shifted);

  Vector w = ridge_init(g, c, opts.init_ridge);
  Vector xi = w;
  Vector zeta = w;
  Vector qxi = matvec(q, xi);
  const double f0 = penalized_quadratic(xi, qxi, c_s, tail_s, lambda_s);

  FitResult r;
  r.method = Method::v1_dr;
  r.objective_trace.push_back(f0);

  Vector rhs(d);
  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    for (std::size_t i = 0; i < d; ++i)
      rhs[i] = c_s[i] + opts.rho * (xi[i] + zeta[i]);
    Vector w_next = chol.solve(rhs);
    for (std::size_t i = 0; i < d; ++i)
      xi[i] = soft_threshold(w_next[i] - zeta[i], lambda_s / opts.rho);
    for (std::size_t i = 0; i < d; ++i)
      zeta[i] += opts.rho * (xi[i] - w_next[i]);

    qxi = matvec(q, xi);
    const double f = penalized_quadratic(xi, qxi, c_s, tail_s, lambda_s);
    r.objective_trace.push_back(f);
    check_blowup(f, f0, who);

    const double delta = rel_change(w_next, w);
    w = std::move(w_next);
    if (delta < opts.tol) {
      r.converged = true;
      r.iterations = k + 1;
      break;
    }
  }
  if (!r.converged) r.iterations = opts.max_iter;
  if (unit != 1.0)
    for (double& v : r.objective_trace) v *= q_norm;
  r.weights = std::move(xi);  // the thresholded iterate carries exact zeros
  r.extras["mu"] = mu;
  r.extras["rho"] = opts.rho;
  return r;
}

namespace {

struct InnerState {
  Vector gamma;
  std::size_t iterations = 0;
  double constraint_residual = 0.0;
  double coupling_residual = 0.0;
};

CholeskyFactor factor_inner_system(const Matrix& g, const Vector& c, double rho) {
  Matrix m = g;
  add_scaled_outer(m, c, rho);
  add_scaled_identity(m, rho);
  return CholeskyFactor(m);
}

// Splitting solver for the normalized subproblem
//   min 0.5 gamma' G gamma + (lambda/t_l)*||gamma||_1  s.t.  c'gamma = 1
// with c = X'y. One multiplier (nu) ascends on the scalar constraint; a
// second, vector-valued one (u) rides the gamma = beta coupling so the
// coupling residual actually reaches zero instead of stalling at the
// soft-threshold width. The penalty rho is rebalanced against the residuals
// while iterating: when the outer scheme drives lambda/t far from the
// iterate scale, a fixed rho would leave the scaled dual u crawling toward
// the threshold, stalling the loop for any budget. The object is kept alive
// across outer iterations so a learned rho carries over.
class InnerAdmm {
 public:
  InnerAdmm(const Matrix& g, const Vector& c, double rho)
      : g_(g), c_(c), rho0_(rho), rho_(rho),
        chol_(factor_inner_system(g, c, rho)) {}

  InnerState solve(double shrink_scale, Vector gamma, std::size_t max_iter,
                   double tol) {
    const std::size_t d = gamma.size();
    Vector beta = gamma;
    Vector beta_prev = beta;
    Vector u(d, 0.0);
    double nu = 1.0;
    Vector rhs(d);
    double cres = 0.0;
    double kres = 0.0;
    for (std::size_t k = 0; k < max_iter; ++k) {
      for (std::size_t i = 0; i < d; ++i)
        rhs[i] = rho_ * (beta[i] - u[i]) + (rho_ - nu) * c_[i];
      gamma = chol_.solve(rhs);
      beta_prev = beta;
      const double shrink = shrink_scale / rho_;
      for (std::size_t i = 0; i < d; ++i)
        beta[i] = soft_threshold(gamma[i] + u[i], shrink);
      for (std::size_t i = 0; i < d; ++i) u[i] += gamma[i] - beta[i];
      const double cg = dot(c_, gamma);
      nu += rho_ * (cg - 1.0);
      cres = std::abs(cg - 1.0);
      double coupling = 0.0;
      double dual = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double e = gamma[i] - beta[i];
        coupling += e * e;
        const double s = beta[i] - beta_prev[i];
        dual += s * s;
      }
      kres = std::sqrt(coupling);
      if (cres <= tol && kres <= tol)
        return {std::move(gamma), k + 1, cres, kres};

      if ((k + 1) % kAdaptEvery == 0) {
        const double primal = std::sqrt(coupling + (cg - 1.0) * (cg - 1.0));
        rebalance(primal, rho_ * std::sqrt(dual), u);
      }
    }
    std::ostringstream os;
    os << "v2_admm_inner: no convergence within " << max_iter
       << " iterations (constraint residual " << cres
       << ", coupling residual " << kres << ")";
    throw ConvergenceError(os.str(), std::max(cres, kres));
  }

 private:
  void rebalance(double primal, double dual, Vector& u) {
    double next = rho_;
    if (primal > 10.0 * dual)
      next = std::min(rho_ * 2.0, rho0_ * 1e9);
    else if (dual > 10.0 * primal)
      next = std::max(rho_ * 0.5, rho0_ * 1e-9);
    if (next == rho_) return;
    for (double& e : u) e *= rho_ / next;  // u carries the 1/rho scaling
    rho_ = next;
    chol_ = factor_inner_system(g_, c_, rho_);
  }

  static constexpr std::size_t kAdaptEvery = 25;

  const Matrix& g_;
  const Vector& c_;
  double rho0_;
  double rho_;
  CholeskyFactor chol_;
};

constexpr std::size_t kInnerMaxIter = 10000;
constexpr double kInnerTol = 1e-8;

}  // namespace

Vector v2_admm_inner(const Matrix& x, const Vector& y, double lambda, double t_l,
                     const Vector& gamma0, double rho, std::size_t max_iter,
                     double tol) {
  check_problem(x, y, "v2_admm_inner");
  if (!(lambda >= 0.0))
    throw InvalidInputError("v2_admm_inner: lambda must be nonnegative");
  if (!(t_l > 0.0))
    throw InvalidInputError("v2_admm_inner: t_l must be positive");
  if (!(rho > 0.0))
    throw InvalidInputError("v2_admm_inner: rho must be positive");
  if (gamma0.size() != x.cols())
    throw DimensionError("v2_admm_inner: gamma0 length does not match X columns");
  if (!all_finite(gamma0))
    throw InvalidInputError("v2_admm_inner: gamma0 has non-finite entries");

  const Matrix g = gram(x);
  const Vector c = matvec_transposed(x, y);
  InnerAdmm admm(g, c, rho);
  return admm.solve(lambda / t_l, gamma0, max_iter, tol).gamma;
}

double v2_t_update(double lambda, double gamma_l1, double y_norm_sq) {
  if (!(y_norm_sq > 0.0))
    throw InvalidInputError("v2_t_update: y_norm_sq must be positive");
  if (!(lambda >= 0.0) || !(gamma_l1 >= 0.0))
    throw InvalidInputError("v2_t_update: lambda and gamma_l1 must be nonnegative");
  const double p = lambda * gamma_l1;
  if (p == 0.0) return 1.0 / y_norm_sq;

  auto slope = [y_norm_sq, p](double t) {
    return y_norm_sq * t * t * t - t * t - p;
  };
  // the root sits in [max(cbrt(p/||y||^2), 1/||y||^2), that sum], so this
  // bracket always straddles it; the expansion loop is a safety net
  const double t_cand = std::cbrt(p / y_norm_sq) + 1.0 / y_norm_sq;
  const double lo = std::min(0.5 / y_norm_sq, t_cand);
  double hi = std::max(2.0 / y_norm_sq, 2.0 * t_cand);
  for (int grow = 0; slope(hi) <= 0.0 && grow < 200; ++grow) hi *= 2.0;
  // tol 0 drives the bisection to the last representable bracket, leaving a
  // derivative residual at roundoff level
  return bisect_root(slope, lo, hi, 0.0);
}

FitResult v2_solve(const Matrix& x, const Vector& y, const SolverOptions& opts) {
  const char* who = "v2_solve";
  check_problem(x, y, who);
  opts.validate();

  const Matrix g = gram(x);
  const Vector c = matvec_transposed(x, y);
  const std::size_t d = x.cols();
  const double kappa = norm2(c);
  if (kappa == 0.0)
    throw DegenerateDirectionError(
        std::string(who) + ": X^T y = 0, the covariance target is degenerate");
  const double y_sq = dot(y, y);

  // Rescaling the data as (aX, ay) while dividing lambda by a^2 leaves the
  // minimizing w untouched and multiplies the objective by a^2. Pick a so that
  // ||X^T y|| becomes 1: that puts the Gram pieces on the same footing as the
  // rho-weighted coupling and constraint terms of the inner splitting, whose
  // balance otherwise collapses on small-return data. Everything below runs in
  // that frame; reported t, gamma, and objective values are mapped back.
  Matrix g_s = g;
  {
    double* gd = g_s.data();
    for (std::size_t i = 0; i < d * d; ++i) gd[i] /= kappa;
  }
  const Vector c_s = scaled(c, 1.0 / kappa);
  const double y_sq_s = y_sq / kappa;
  const double lambda_s = opts.lambda * kappa;

  Vector w0 = ridge_init(g, c, opts.init_ridge);
  double s0 = dot(c_s, w0);
  if (s0 == 0.0)
    throw DegenerateDirectionError(
        std::string(who) + ": starting point has y^T X w = 0");
  if (s0 < 0.0) {
    for (double& v : w0) v = -v;
    s0 = -s0;
  }
  double t = 1.0 / s0;
  Vector gamma = scaled(w0, t);

  InnerAdmm inner(g_s, c_s, opts.rho);

  // normalized objective 0.5||X gamma - t y||^2 + (lambda/t)||gamma||_1,
  // evaluated through G and c; all descent decisions reuse this evaluator
  auto objective = [&](const Vector& gm, double tt) {
    return 0.5 * dot(gm, matvec(g_s, gm)) - tt * dot(c_s, gm) +
           0.5 * y_sq_s * tt * tt + (lambda_s / tt) * norm1(gm);
  };

  FitResult r;
  r.method = Method::v2;
  double f_curr = objective(gamma, t);
  r.objective_trace.push_back(f_curr);

  double cres_last = std::abs(dot(c_s, gamma) - 1.0);
  double cres_max = cres_last;
  double inner_total = 0.0;

  for (std::size_t l = 0; l < opts.max_iter; ++l) {
    InnerState st = inner.solve(lambda_s / t, gamma, kInnerMaxIter, kInnerTol);
    inner_total += static_cast<double>(st.iterations);

    // accept the inner result only if it does not degrade the objective at
    // the current scale; near convergence the fixed inner tolerance can
    // produce noise-level regressions
    Vector gamma_next;
    double f_gamma;
    const double f_cand = objective(st.gamma, t);
    if (f_cand <= f_curr) {
      gamma_next = std::move(st.gamma);
      f_gamma = f_cand;
      cres_last = st.constraint_residual;
    } else {
      gamma_next = gamma;
      f_gamma = f_curr;
    }
    cres_max = std::max(cres_max, st.constraint_residual);

    const double t_cand = v2_t_update(lambda_s, norm1(gamma_next), y_sq_s);
    double t_next = t;
    double f_next = f_gamma;
    const double f_t = objective(gamma_next, t_cand);
    if (f_t <= f_gamma) {
      t_next = t_cand;
      f_next = f_t;
    }
    r.objective_trace.push_back(f_next);

    double num = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e = gamma_next[i] - gamma[i];
      num += e * e;
    }
    const double dt = t_next - t;
    num = std::sqrt(num + dt * dt);
    const double den = 1.0 + std::sqrt(dot(gamma, gamma) + t * t);

    gamma = std::move(gamma_next);
    t = t_next;
    f_curr = f_next;
    if (num / den < opts.tol) {
      r.converged = true;
      r.iterations = l + 1;
      break;
    }
  }
  if (!r.converged) r.iterations = opts.max_iter;

  // leave the normalized frame: w = gamma / t is invariant, t and gamma carry
  // a factor of kappa, the objective a factor of 1/kappa
  r.weights = scaled(gamma, 1.0 / t);
  for (double& v : r.objective_trace) v /= kappa;
  const double cov = dot(c, r.weights);
  if (!(cov > 0.0))
    throw NumericalError(std::string(who) +
                         ": final direction lost positive covariance");
  r.extras["t"] = t / kappa;
  r.extras["constraint_residual"] = cres_last;
  r.extras["max_constraint_residual"] = cres_max;
  r.extras["gamma_norm1"] = norm1(gamma) / kappa;
  r.extras["inner_iterations"] = inner_total;
  return r;
}

}  // namespace plslasso
