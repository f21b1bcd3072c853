#include "plslasso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plslasso {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void axpy(Vector& y, double alpha, const Vector& x) {
  if (y.size() != x.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(const Vector& v, double alpha) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * v[i];
  return out;
}

Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("add: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("sub: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Matrix& m) {
  const double* p = m.data();
  const std::size_t n = m.rows() * m.cols();
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * x[j];
    out[i] = s;
  }
  return out;
}

Vector matvec_transposed(const Matrix& a, const Vector& x) {
  if (a.rows() != x.size())
    throw DimensionError("matvec_transposed: dimension mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += row[j] * xi;
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* orow = out.data() + i * out.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix gram(const Matrix& x) {
  const std::size_t d = x.cols();
  Matrix g(d, d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* row = x.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = row[i];
      if (xi == 0.0) continue;
      double* grow = g.data() + i * d;
      for (std::size_t j = i; j < d; ++j) grow[j] += xi * row[j];
    }
  }
  // mirror the upper triangle
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

void add_scaled_outer(Matrix& a, const Vector& u, double alpha) {
  if (a.rows() != a.cols() || a.rows() != u.size())
    throw DimensionError("add_scaled_outer: dimension mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = alpha * u[i];
    double* row = a.data() + i * a.cols();
    for (std::size_t j = 0; j < u.size(); ++j) row[j] += ui * u[j];
  }
}

void add_scaled_identity(Matrix& a, double alpha) {
  if (a.rows() != a.cols())
    throw DimensionError("add_scaled_identity: matrix not square");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += alpha;
}

double max_abs_entry(const Matrix& a) {
  double m = 0.0;
  const double* p = a.data();
  const std::size_t n = a.rows() * a.cols();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

Vector soft_threshold(const Vector& v, double tau) {
  if (tau < 0.0) throw InvalidInputError("soft_threshold: tau must be nonnegative");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], tau);
  return out;
}

namespace {

void require_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << who << ": matrix is " << a.rows() << "x" << a.cols() << ", not square";
    throw DimensionError(os.str());
  }
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10) {
        std::ostringstream os;
        os << who << ": asymmetric at (" << i << "," << j << "): "
           << a(i, j) << " vs " << a(j, i);
        throw DimensionError(os.str());
      }
}

void normalize(Vector& u) {
  const double n = norm2(u);
  if (n > 0.0)
    for (double& x : u) x /= n;
}

// Deterministic start vectors for the power iteration (splitmix64 stream).
// A fixed direction like all-ones can sit exactly in a non-dominant
// eigenspace; a seeded pseudo-random one has generic overlap with every
// eigendirection while keeping runs reproducible.
Vector pseudo_random_unit(std::size_t n, std::uint64_t seed) {
  Vector u(n);
  std::uint64_t z = seed;
  for (std::size_t i = 0; i < n; ++i) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = z;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    u[i] = static_cast<double>(x >> 11) * 0x1p-52 - 1.0;
  }
  normalize(u);
  return u;
}

}  // namespace

double spectral_norm_sym(const Matrix& a, double rel_tol, std::size_t max_iter) {
  require_symmetric(a, "spectral_norm_sym");
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;
  const double scale = max_abs_entry(a);
  if (scale == 0.0) return 0.0;

  Vector u = pseudo_random_unit(n, 0x5eeded51ULL);
  bool restarted = false;
  bool kicked = false;
  double sigma_prev = -1.0;
  double change_prev = -1.0;
  double sigma = 0.0;
  double sigma_best = 0.0;  // every ||A u|| with unit u bounds sigma from below
  for (std::size_t k = 0; k < max_iter; ++k) {
    Vector au = matvec(a, u);
    sigma = norm2(au);
    sigma_best = std::max(sigma_best, sigma);
    if (sigma <= scale * 1e-300) {
      // start vector annihilated; restart once from a fresh direction
      if (restarted)
        throw ConvergenceError("spectral_norm_sym: iterate annihilated twice",
                               sigma_best);
      restarted = true;
      u = pseudo_random_unit(n, 0xfeedf00dULL);
      sigma_prev = -1.0;
      change_prev = -1.0;
      continue;
    }
    if (sigma_prev >= 0.0) {
      const double change = std::abs(sigma - sigma_prev);
      if (change <= rel_tol * sigma * 1e-2) {
        // estimate fully stagnant; before trusting it, mix in a fresh
        // direction once in case the iterate settled in a minor eigenspace
        if (!kicked) {
          kicked = true;
          const Vector kick = pseudo_random_unit(n, 0xc0ffee ^ (k + 1));
          axpy(u, 0.25, kick);
          normalize(u);
          sigma_prev = -1.0;
          change_prev = -1.0;
          continue;
        }
        return sigma_best;
      }
      if (change_prev > 0.0) {
        // geometric decay of the estimate error: err_k ~ change * r/(1-r)
        const double r = change / change_prev;
        if (r < 0.999 && change * r / (1.0 - r) <= rel_tol * sigma)
          return sigma_best;
      }
      if (change <= rel_tol * sigma && change_prev >= 0.0 &&
          change_prev <= rel_tol * sigma && k > 20) {
        return sigma_best;
      }
      change_prev = change;
    }
    sigma_prev = sigma;
    u = std::move(au);
    normalize(u);
  }
  throw ConvergenceError("spectral_norm_sym: no convergence within iteration cap",
                         sigma_best);
}

double min_eigenvalue_sym(const Matrix& a, double rel_tol) {
  require_symmetric(a, "min_eigenvalue_sym");
  const double sigma = spectral_norm_sym(a, rel_tol);
  if (sigma == 0.0) return 0.0;
  // B = sigma*I - A has spectrum sigma - lambda_i >= 0, so its spectral norm
  // is sigma - lambda_min.
  Matrix b(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      b(i, j) = (i == j ? sigma : 0.0) - a(i, j);
  const double shifted = spectral_norm_sym(b, rel_tol);
  return sigma - shifted;
}

CholeskyFactor::CholeskyFactor(const Matrix& a) {
  require_symmetric(a, "CholeskyFactor");
  n_ = a.rows();
  lower_ = Matrix(n_, n_);
  // numerically singular inputs (pivot negligible next to the diagonal
  // scale) are rejected like indefinite ones so callers can fall back
  double dmax = 0.0;
  for (std::size_t j = 0; j < n_; ++j) dmax = std::max(dmax, a(j, j));
  const double pivot_floor = dmax * 1e-13;
  for (std::size_t j = 0; j < n_; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= lower_(j, k) * lower_(j, k);
    if (!(diag > pivot_floor) || !std::isfinite(diag)) {
      std::ostringstream os;
      os << "CholeskyFactor: matrix not positive definite at pivot " << j
         << " (value " << diag << ")";
      throw NumericalError(os.str());
    }
    const double ljj = std::sqrt(diag);
    lower_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n_; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = s / ljj;
    }
  }
}

Vector CholeskyFactor::solve(const Vector& b) const {
  if (b.size() != n_) throw DimensionError("CholeskyFactor::solve: length mismatch");
  Vector x(b);
  // forward substitution L z = b
  for (std::size_t i = 0; i < n_; ++i) {
    double s = x[i];
    const double* row = lower_.row(i);
    for (std::size_t k = 0; k < i; ++k) s -= row[k] * x[k];
    x[i] = s / row[i];
  }
  // back substitution L^T x = z
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n_; ++k) s -= lower_(k, ii) * x[k];
    x[ii] = s / lower_(ii, ii);
  }
  return x;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw DimensionError("solve_spd: dimension mismatch");
  return CholeskyFactor(a).solve(b);
}

}  // namespace plslasso
