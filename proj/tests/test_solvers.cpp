#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "plslasso/diagnostics.hpp"
#include "plslasso/errors.hpp"
#include "plslasso/solvers.hpp"
#include "testutil.hpp"

using namespace plslasso;

TEST_CASE("method names round-trip") {
  CHECK(to_string(Method::lasso_ista) == "lasso_ista");
  CHECK(method_from_string("v1_dr") == Method::v1_dr);
  CHECK(method_from_string("lasso") == Method::lasso_ista);
  CHECK_THROWS_AS(method_from_string("newton"), InvalidInputError);
}

TEST_CASE("SolverOptions::validate rejects bad fields") {
  SolverOptions opts;
  opts.lambda = -1.0;
  CHECK_THROWS_AS(opts.validate(), InvalidInputError);
  opts = {};
  opts.tol = 0.0;
  CHECK_THROWS_AS(opts.validate(), InvalidInputError);
  opts = {};
  opts.rho = 0.0;
  CHECK_THROWS_AS(opts.validate(), InvalidInputError);
  opts = {};
  opts.max_iter = 0;
  CHECK_THROWS_AS(opts.validate(), InvalidInputError);
  opts = {};
  opts.step_size = -0.5;
  CHECK_THROWS_AS(opts.validate(), InvalidInputError);
  opts = {};
  opts.mu = std::nan("");
  CHECK_THROWS_AS(opts.validate(), InvalidInputError);
  opts = {};
  CHECK_NOTHROW(opts.validate());
}

TEST_CASE("lasso_ista recovers the orthonormal closed form") {
  const Matrix x = Matrix::identity(2);
  const Vector y{3.0, 1.0};
  SolverOptions opts;
  opts.lambda = 0.5;
  auto res = lasso_ista(x, y, opts);
  CHECK(res.converged);
  CHECK(res.weights[0] == doctest::Approx(2.5).epsilon(1e-7));
  CHECK(res.weights[1] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(res.method == Method::lasso_ista);
  auto rep = kkt_report(x, y, res.weights, 0.5);
  CHECK(rep.max_kkt_violation <= 1e-6);
  CHECK(rep.support_sign_ok);
}

TEST_CASE("lasso_ista returns exact zeros once lambda dominates") {
  const Matrix x = Matrix::identity(2);
  const Vector y{3.0, 1.0};
  SolverOptions opts;
  opts.lambda = 5.0;
  auto res = lasso_ista(x, y, opts);
  CHECK(res.converged);
  CHECK(res.weights[0] == 0.0);
  CHECK(res.weights[1] == 0.0);
  CHECK(res.objective_trace.back() == doctest::Approx(5.0));
}

TEST_CASE("lasso_ista matches the dense grid on a coupled design") {
  Matrix x(2, 2, 0.0);
  x(0, 0) = 1.0;
  x(0, 1) = 1.0;
  x(1, 1) = 1.0;
  const Vector y{1.0, 1.0};
  SolverOptions opts;
  opts.lambda = 0.1;
  auto res = lasso_ista(x, y, opts);
  CHECK(res.converged);
  CHECK(res.weights[0] == 0.0);  // the first coordinate is screened out exactly
  CHECK(res.weights[1] == doctest::Approx(0.95).epsilon(1e-6));
  auto ref = reference_solve(RefProblem::lasso, x, y, 0.1);
  const double f = objective_lasso(x, y, res.weights, 0.1);
  CHECK(f <= ref.objective + 1e-4);
}

TEST_CASE("lasso_ista objective trace never increases") {
  testutil::Rand r(7);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 5 + r.integer(20);
    const std::size_t d = 2 + r.integer(8);
    const Matrix x = testutil::random_matrix(r, n, d);
    const Vector y = testutil::random_vector(r, n);
    SolverOptions opts;
    opts.lambda = r.uniform(0.0, 1.0);
    auto res = lasso_ista(x, y, opts);
    const auto& tr = res.objective_trace;
    REQUIRE(!tr.empty());
    for (std::size_t k = 1; k < tr.size(); ++k) {
      CHECK(tr[k] <= tr[k - 1] + 1e-12);
    }
  }
}

TEST_CASE("lasso_ista honors a caller-supplied step size") {
  const Matrix x = Matrix::identity(2);
  const Vector y{3.0, 1.0};
  SolverOptions opts;
  opts.lambda = 0.5;
  opts.step_size = 0.9;  // below 1/lambda_max = 1, still convergent
  auto res = lasso_ista(x, y, opts);
  CHECK(res.converged);
  CHECK(res.weights[0] == doctest::Approx(2.5).epsilon(1e-7));
  CHECK(res.extras.at("step_size") == doctest::Approx(0.9));
}

TEST_CASE("lasso_ista rejects malformed problems") {
  const Matrix x = Matrix::identity(2);
  SolverOptions opts;
  opts.lambda = 0.1;
  CHECK_THROWS_AS(lasso_ista(x, {1.0, 2.0, 3.0}, opts), DimensionError);
  CHECK_THROWS_AS(lasso_ista(Matrix(2, 0, 0.0), {1.0, 2.0}, opts),
                  InvalidInputError);
  Matrix bad = x;
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(lasso_ista(bad, {1.0, 2.0}, opts), InvalidInputError);
  opts.mu = 0.01;
  CHECK_THROWS_AS(lasso_ista(x, {1.0, 2.0}, opts), InvalidInputError);
}

TEST_CASE("ost keeps the largest screened coefficients") {
  const Matrix x = Matrix::identity(3);
  const Vector y{0.5, -2.0, 1.0};
  auto res = ost(x, y, 2);
  CHECK(res.weights[0] == 0.0);
  CHECK(res.weights[1] == doctest::Approx(-2.0));
  CHECK(res.weights[2] == doctest::Approx(1.0));
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.extras.at("k") == doctest::Approx(2.0));
}

TEST_CASE("ost with full support reproduces least squares") {
  testutil::Rand r(11);
  const Matrix x = testutil::random_matrix(r, 12, 4);
  const Vector y = testutil::random_vector(r, 12);
  auto res = ost(x, y, 4);
  const Vector ols = solve_spd(gram(x), matvec_transposed(x, y));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(res.weights[i] == doctest::Approx(ols[i]).epsilon(1e-10));
  }
}

TEST_CASE("ost support matches an independent screen") {
  testutil::Rand r(13);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 8 + r.integer(10);
    const std::size_t d = 3 + r.integer(5);
    const Matrix x = testutil::random_matrix(r, n, d);
    const Vector y = testutil::random_vector(r, n);
    const std::size_t k = 1 + r.integer(d);
    auto res = ost(x, y, k);
    // rank |X^T y| by hand and confirm the kept coordinates coincide
    const Vector z = matvec_transposed(x, y);
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(z[a]) > std::abs(z[b]);
    });
    for (std::size_t i = 0; i < d; ++i) {
      const bool kept =
          std::find(order.begin(), order.begin() + k, i) != order.begin() + k;
      CHECK((res.weights[i] != 0.0) == kept);
    }
  }
}

TEST_CASE("ost breaks screening ties toward the lower index") {
  // two identical columns tie on |X^T y|; the singular Gram falls back to a
  // ridge-regularized solve
  Matrix x(2, 2, 0.0);
  x(0, 0) = 1.0;
  x(0, 1) = 1.0;
  const Vector y{1.0, 0.0};
  auto res = ost(x, y, 1);
  CHECK(res.weights[0] != 0.0);
  CHECK(res.weights[1] == 0.0);

  auto both = ost(x, y, 2);
  CHECK(both.extras.count("ridge_fallback") == 1);
  CHECK(all_finite(both.weights));
}

TEST_CASE("ost rejects an out-of-range support size") {
  const Matrix x = Matrix::identity(3);
  const Vector y{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(ost(x, y, 0), InvalidInputError);
  CHECK_THROWS_AS(ost(x, y, 4), InvalidInputError);
}

TEST_CASE("pls_first_direction is the normalized covariance vector") {
  Matrix x(1, 2, 0.0);
  x(0, 0) = 3.0;
  x(0, 1) = 4.0;
  const Vector y{1.0};
  auto w = pls_first_direction(x, y);
  CHECK(w[0] == doctest::Approx(0.6));
  CHECK(w[1] == doctest::Approx(0.8));
  CHECK(norm2(w) == doctest::Approx(1.0));

  const Matrix id = Matrix::identity(2);
  auto e1 = pls_first_direction(id, {2.0, 0.0});
  CHECK(e1[0] == doctest::Approx(1.0));
  CHECK(e1[1] == doctest::Approx(0.0));
}

TEST_CASE("pls_first_direction maximizes covariance over sampled unit vectors") {
  testutil::Rand r(17);
  const Matrix x = testutil::random_matrix(r, 15, 5);
  const Vector y = testutil::random_vector(r, 15);
  auto w = pls_first_direction(x, y);
  const double best = dot(y, matvec(x, w));
  CHECK(best > 0.0);
  double sampled = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    Vector u = testutil::random_vector(r, 5);
    const double nu = norm2(u);
    if (nu == 0.0) continue;
    sampled = std::max(sampled, std::abs(dot(y, matvec(x, scaled(u, 1.0 / nu)))));
  }
  CHECK(sampled <= best * (1.0 + 1e-12));
  CHECK(sampled >= best * 0.9);  // 10k draws in d=5 land near the optimum
}

TEST_CASE("pls_first_direction rejects a zero covariance vector") {
  const Matrix x = Matrix::identity(2);
  CHECK_THROWS_AS(pls_first_direction(x, {0.0, 0.0}), DegenerateDirectionError);
}
