#pragma once

// Test-only deterministic random instance helpers. Kept separate from the
// library's synthetic generator so oracle inputs do not depend on the code
// under test.

#include <cstdint>
#include <random>

#include "plslasso/linalg.hpp"

namespace testutil {

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in (0, 1)
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, one value per call (partner discarded for simplicity).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t integer(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

inline plslasso::Matrix random_matrix(Rand& r, std::size_t n, std::size_t d,
                                      double scale = 1.0) {
  plslasso::Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = scale * r.normal();
  return x;
}

inline plslasso::Vector random_vector(Rand& r, std::size_t n, double scale = 1.0) {
  plslasso::Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = scale * r.normal();
  return v;
}

// Random SPD matrix B^T B + I.
inline plslasso::Matrix random_spd(Rand& r, std::size_t n) {
  plslasso::Matrix b = random_matrix(r, n, n);
  plslasso::Matrix a = plslasso::gram(b);
  plslasso::add_scaled_identity(a, 1.0);
  return a;
}

inline plslasso::Matrix random_symmetric(Rand& r, std::size_t n, double scale = 1.0) {
  plslasso::Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = scale * r.normal();
  return a;
}

}  // namespace testutil
