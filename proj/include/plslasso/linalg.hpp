#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "plslasso/errors.hpp"

// Dense row-major linear algebra and scalar root finding. Everything here is
// deterministic and pure; sizes are desk scale (d <= a few hundred), so plain
// O(n^3) factorizations are fine.

namespace plslasso {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  // Row-major storage, exposed for tight loops.
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---- vector helpers ----

double dot(const Vector& a, const Vector& b);
double norm1(const Vector& v);
double norm2(const Vector& v);
double norm_inf(const Vector& v);
// y += alpha * x
void axpy(Vector& y, double alpha, const Vector& x);
Vector scaled(const Vector& v, double alpha);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

// ---- matrix products ----

Vector matvec(const Matrix& a, const Vector& x);            // A x
Vector matvec_transposed(const Matrix& a, const Vector& x); // A^T x
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix gram(const Matrix& x);                               // X^T X
// a += alpha * u u^T (a square, len(u) == a.rows())
void add_scaled_outer(Matrix& a, const Vector& u, double alpha);
// a += alpha * I
void add_scaled_identity(Matrix& a, double alpha);
double max_abs_entry(const Matrix& a);

// ---- soft thresholding ----

// S_tau(x) = [|x| - tau]_+ sgn(x)
inline double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double tau);

// ---- symmetric eigenvalue estimates ----

// Largest absolute eigenvalue of a symmetric matrix by power iteration from a
// fixed pseudo-random start (so no axis-aligned matrix can hide its dominant
// eigenvector from the initial direction). The estimate sigma_k = ||A u_k|| is
// a lower bound at every step, so the returned value approaches the spectral
// norm from below.
double spectral_norm_sym(const Matrix& a, double rel_tol = 1e-8,
                         std::size_t max_iter = 50000);

// Smallest eigenvalue of a symmetric matrix via the shifted operator
// sigma*I - A, where sigma = spectral_norm_sym(A).
double min_eigenvalue_sym(const Matrix& a, double rel_tol = 1e-10);

// ---- SPD solves ----

// Cholesky factorization held for repeated right-hand sides.
class CholeskyFactor {
 public:
  // Throws NumericalError naming the failing pivot if A is not SPD.
  explicit CholeskyFactor(const Matrix& a);
  Vector solve(const Vector& b) const;
  std::size_t dim() const { return n_; }

 private:
  std::size_t n_ = 0;
  Matrix lower_;
};

// One-shot SPD solve; ||Ax - b|| <= 1e-8 (1 + ||b||) for well-conditioned A.
Vector solve_spd(const Matrix& a, const Vector& b);

// ---- scalar root finding ----

// Deterministic midpoint bisection. Returns r with |g(r)| <= tol or bracket
// width <= tol. Requires a sign change over [lo, hi]. A tol of zero bisects
// until the bracket has no representable interior point.
template <class F>
double bisect_root(F&& g, double lo, double hi, double tol) {
  if (!(lo < hi)) throw BracketError("bisect_root: requires lo < hi");
  if (!(tol >= 0.0)) throw InvalidInputError("bisect_root: tol must be nonnegative");
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0))
    throw BracketError("bisect_root: no sign change over [lo, hi]");
  double mid = lo;
  for (int iter = 0; iter < 2000; ++iter) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in double precision
    const double gm = g(mid);
    if (std::abs(gm) <= tol) return mid;
    if ((gm > 0.0) == (ghi > 0.0)) {
      hi = mid;
      ghi = gm;
    } else {
      lo = mid;
      glo = gm;
    }
    if (hi - lo <= tol) return 0.5 * (lo + hi);
  }
  return mid;
}

}  // namespace plslasso
