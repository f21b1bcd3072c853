#include "plslasso/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plslasso/errors.hpp"

namespace plslasso {

namespace {

void check_triplet(const Matrix& x, const Vector& y, const Vector& w,
                   const char* who) {
  if (x.rows() != y.size() || x.cols() != w.size()) {
    std::ostringstream os;
    os << who << ": X is " << x.rows() << "x" << x.cols() << " but y has "
       << y.size() << " entries and w has " << w.size();
    throw DimensionError(os.str());
  }
}

double half_residual_sq(const Matrix& x, const Vector& y, const Vector& w,
                        Vector* xw_out) {
  Vector xw = matvec(x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = xw[i] - y[i];
    s += e * e;
  }
  if (xw_out) *xw_out = std::move(xw);
  return 0.5 * s;
}

}  // namespace

double objective_lasso(const Matrix& x, const Vector& y, const Vector& w,
                       double lambda) {
  check_triplet(x, y, w, "objective_lasso");
  return half_residual_sq(x, y, w, nullptr) + lambda * norm1(w);
}

double objective_v1(const Matrix& x, const Vector& y, const Vector& w,
                    double lambda, double mu) {
  check_triplet(x, y, w, "objective_v1");
  Vector xw;
  const double lsq = half_residual_sq(x, y, w, &xw);
  const double s = dot(y, xw);
  return lsq - 0.5 * mu * s * s + lambda * norm1(w);
}

double objective_v2(const Matrix& x, const Vector& y, const Vector& w,
                    double lambda) {
  check_triplet(x, y, w, "objective_v2");
  Vector xw;
  const double lsq = half_residual_sq(x, y, w, &xw);
  const double s = dot(y, xw);
  if (s == 0.0)
    throw PoleError("objective_v2: y^T X w = 0, the ratio objective has a pole");
  // ratio form and its expansion must coincide; a mismatch signals an
  // evaluation bug rather than a property of the input
  const double ratio_form = lsq / (s * s);
  const double expanded_form =
      (dot(xw, xw) + dot(y, y)) / (2.0 * s * s) - 1.0 / s;
  const double scale =
      std::max({1.0, std::abs(ratio_form), std::abs(expanded_form)});
  if (std::abs(ratio_form - expanded_form) > 1e-10 * scale) {
    std::ostringstream os;
    os << "objective_v2: the two algebraic forms disagree (" << ratio_form
       << " vs " << expanded_form << ")";
    throw NumericalError(os.str());
  }
  return ratio_form + lambda * norm1(w);
}

OptimalityReport kkt_report(const Matrix& x, const Vector& y, const Vector& w,
                            double lambda, std::optional<double> mu) {
  check_triplet(x, y, w, "kkt_report");
  if (!(lambda >= 0.0))
    throw InvalidInputError("kkt_report: lambda must be nonnegative");

  Vector xw = matvec(x, w);
  Vector resid(xw.size());
  for (std::size_t i = 0; i < xw.size(); ++i) resid[i] = xw[i] - y[i];
  Vector grad = matvec_transposed(x, resid);
  if (mu && *mu != 0.0) {
    const double s = dot(y, xw);
    const Vector c = matvec_transposed(x, y);
    axpy(grad, -(*mu) * s, c);
  }

  OptimalityReport rep;
  const double sign_slack = 1e-8 * std::max(1.0, lambda);
  for (std::size_t j = 0; j < w.size(); ++j) {
    double viol;
    if (w[j] != 0.0) {
      const double sgn = w[j] > 0.0 ? 1.0 : -1.0;
      viol = std::abs(grad[j] + lambda * sgn);
      if (grad[j] * sgn > sign_slack) rep.support_sign_ok = false;
    } else {
      viol = std::max(std::abs(grad[j]) - lambda, 0.0);
    }
    rep.max_kkt_violation = std::max(rep.max_kkt_violation, viol);
  }
  rep.objective_value = mu ? objective_v1(x, y, w, lambda, *mu)
                           : objective_lasso(x, y, w, lambda);
  return rep;
}

std::size_t cardinality(const Vector& w, double rel_tol) {
  if (!(rel_tol >= 0.0))
    throw InvalidInputError("cardinality: rel_tol must be nonnegative");
  const double thr = rel_tol * std::max(1.0, norm_inf(w));
  std::size_t n = 0;
  for (double v : w)
    if (std::abs(v) > thr) ++n;
  return n;
}

namespace {

// All reference paths work from the normal-equation pieces; evaluators take
// (w, G w) so the scan loops pay one small matvec per point.
struct QuadPieces {
  Matrix g;
  Vector c;
  double y_sq = 0.0;
};

// Exhaustive scan over a regular grid; eval takes the two coordinates as
// scalars so the hot loop stays allocation-free (the second one is pinned to
// zero for one-dimensional problems).
template <class Eval>
RefSolution grid_scan(std::size_t d, const RefOptions& ref, Eval&& eval) {
  const double lo = ref.grid_lo;
  const double hi = ref.grid_hi;
  const double step = ref.grid_step;
  if (!(step > 0.0) || !(hi > lo))
    throw InvalidInputError("reference_solve: bad grid bounds");
  const auto points =
      static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
  const std::size_t inner = d == 1 ? 1 : points;

  RefSolution best;
  best.weights.assign(d, 0.0);
  best.objective = std::numeric_limits<double>::infinity();
  double best0 = 0.0;
  double best1 = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w0 = lo + static_cast<double>(i) * step;
    for (std::size_t j = 0; j < inner; ++j) {
      const double w1 = d == 1 ? 0.0 : lo + static_cast<double>(j) * step;
      const double f = eval(w0, w1);
      if (f < best.objective) {
        best.objective = f;
        best0 = w0;
        best1 = w1;
      }
    }
  }
  best.weights[0] = best0;
  if (d == 2) best.weights[1] = best1;
  best.stabilized = std::isfinite(best.objective);
  return best;
}

// Diminishing-step subgradient descent with best-point tracking; `project`
// reimposes an affine constraint after every step (identity for the
// unconstrained problems).
template <class Grad, class Eval, class Project>
RefSolution subgradient_descent(Vector w, double step0, std::size_t steps,
                                Grad&& grad, Eval&& eval, Project&& project) {
  RefSolution best;
  best.weights = w;
  best.objective = eval(w);
  const std::size_t checkpoint = steps - steps / 10;  // last 10% of the budget
  double objective_at_checkpoint = best.objective;
  for (std::size_t k = 0; k < steps; ++k) {
    const double alpha = step0 / std::sqrt(static_cast<double>(k + 1));
    Vector g = grad(w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= alpha * g[i];
    project(w);
    const double f = eval(w);
    if (f < best.objective) {
      best.objective = f;
      best.weights = w;
    }
    if (k + 1 == checkpoint) objective_at_checkpoint = best.objective;
  }
  // stabilized when the tail of the budget no longer buys improvement
  best.stabilized = objective_at_checkpoint - best.objective <=
                    1e-7 * (1.0 + std::abs(best.objective));
  return best;
}

double sgn0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

RefSolution reference_solve(RefProblem problem, const Matrix& x, const Vector& y,
                            double lambda, const RefOptions& ref) {
  if (x.rows() != y.size())
    throw DimensionError("reference_solve: X rows and y length differ");
  if (!(lambda >= 0.0))
    throw InvalidInputError("reference_solve: lambda must be nonnegative");
  const std::size_t d = x.cols();
  if (d == 0 || d > 50)
    throw InvalidInputError("reference_solve: only instances with 1 <= d <= 50");

  QuadPieces p{gram(x), matvec_transposed(x, y), dot(y, y)};

  switch (problem) {
    case RefProblem::lasso:
    case RefProblem::v1: {
      const double mu = problem == RefProblem::v1 ? ref.mu : 0.0;
      Matrix q = p.g;
      if (mu != 0.0) add_scaled_outer(q, p.c, -mu);
      if (d <= 2) {
        const double q00 = q(0, 0);
        const double q01 = d == 2 ? q(0, 1) : 0.0;
        const double q11 = d == 2 ? q(1, 1) : 0.0;
        const double c0 = p.c[0];
        const double c1 = d == 2 ? p.c[1] : 0.0;
        const double y_half = 0.5 * p.y_sq;
        return grid_scan(d, ref, [=](double w0, double w1) {
          return 0.5 * (q00 * w0 * w0 + 2.0 * q01 * w0 * w1 + q11 * w1 * w1) -
                 c0 * w0 - c1 * w1 + y_half +
                 lambda * (std::abs(w0) + std::abs(w1));
        });
      }
      const double lip = spectral_norm_sym(q);
      const double step0 = 0.5 / std::max(lip, 1e-12);
      return subgradient_descent(
          Vector(d, 0.0), step0, ref.steps,
          [&](const Vector& w) {
            Vector g = matvec(q, w);
            for (std::size_t i = 0; i < d; ++i)
              g[i] += -p.c[i] + lambda * sgn0(w[i]);
            return g;
          },
          [&](const Vector& w) {
            return 0.5 * dot(w, matvec(q, w)) - dot(p.c, w) + 0.5 * p.y_sq +
                   lambda * norm1(w);
          },
          [](Vector&) {});
    }
    case RefProblem::v2_inner: {
      if (!(ref.t > 0.0))
        throw InvalidInputError("reference_solve: t must be positive");
      const double c_sq = dot(p.c, p.c);
      if (c_sq == 0.0)
        throw InvalidInputError(
            "reference_solve: X^T y = 0, the constraint is infeasible");
      const double pen = lambda / ref.t;
      auto eval = [&](const Vector& g) {
        return 0.5 * dot(g, matvec(p.g, g)) + pen * norm1(g);
      };
      auto project = [&](Vector& g) {
        const double shift = (dot(p.c, g) - 1.0) / c_sq;
        axpy(g, -shift, p.c);
      };
      Vector start = scaled(p.c, 1.0 / c_sq);  // feasible point closest to 0
      const double lip = spectral_norm_sym(p.g);
      const double step0 = 0.5 / std::max(lip, 1e-12);
      return subgradient_descent(
          std::move(start), step0, ref.steps,
          [&](const Vector& g) {
            Vector s = matvec(p.g, g);
            for (std::size_t i = 0; i < d; ++i) s[i] += pen * sgn0(g[i]);
            return s;
          },
          eval, project);
    }
    case RefProblem::v2_full: {
      if (d > 2)
        throw InvalidInputError(
            "reference_solve: the ratio objective is only scanned for d <= 2");
      const double g00 = p.g(0, 0);
      const double g01 = d == 2 ? p.g(0, 1) : 0.0;
      const double g11 = d == 2 ? p.g(1, 1) : 0.0;
      const double c0 = p.c[0];
      const double c1 = d == 2 ? p.c[1] : 0.0;
      const double y_sq = p.y_sq;
      return grid_scan(d, ref, [=](double w0, double w1) {
        // ratio objective from the normal-equation pieces; poles excluded
        const double s = c0 * w0 + c1 * w1;
        if (s == 0.0) return std::numeric_limits<double>::infinity();
        const double rss = g00 * w0 * w0 + 2.0 * g01 * w0 * w1 +
                           g11 * w1 * w1 - 2.0 * s + y_sq;
        return 0.5 * rss / (s * s) + lambda * (std::abs(w0) + std::abs(w1));
      });
    }
  }
  throw InvalidInputError("reference_solve: unknown problem selector");
}

}  // namespace plslasso
