#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "plslasso/data.hpp"
#include "plslasso/errors.hpp"
#include "plslasso/solvers.hpp"

using namespace plslasso;

namespace {

const std::string kFixture =
    std::string(PLSLASSO_SOURCE_DIR) + "/data/fixtures/tracking_small.csv";

std::filesystem::path scratch_file(const std::string& name,
                                   const std::string& content) {
  const auto dir = std::filesystem::path("data_test_scratch");
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_csv reads the bundled fixture") {
  auto ds = load_csv(kFixture, "spx");
  CHECK(ds.periods() == 12);
  CHECK(ds.assets() == 3);
  CHECK(ds.index_name == "spx");
  REQUIRE(ds.asset_names.size() == 3);
  CHECK(ds.asset_names[0] == "alpha");
  CHECK(ds.asset_names[2] == "gamma");
  CHECK(ds.dates.size() == 12);
  CHECK(ds.dates.front() == "2021-01-08");
  CHECK(ds.index_returns[0] == 0.0123);
  CHECK(ds.returns(0, 0) == 0.0151);
  CHECK(ds.returns(11, 2) == 0.0022);
  CHECK(ds.source_path == kFixture);
}

TEST_CASE("write_csv round-trips exactly") {
  auto ds = load_csv(kFixture, "spx");
  const auto out = std::filesystem::path("data_test_scratch") / "roundtrip.csv";
  std::filesystem::create_directories(out.parent_path());
  write_csv(ds, out.string());
  auto back = load_csv(out.string(), "spx");
  CHECK(back.periods() == ds.periods());
  CHECK(back.asset_names == ds.asset_names);
  CHECK(back.dates == ds.dates);
  for (std::size_t t = 0; t < ds.periods(); ++t) {
    CHECK(back.index_returns[t] == ds.index_returns[t]);
    for (std::size_t j = 0; j < ds.assets(); ++j) {
      CHECK(back.returns(t, j) == ds.returns(t, j));
    }
  }
}

TEST_CASE("load_csv works without a date column") {
  auto path = scratch_file("nodate.csv", "idx,a,b\n0.1,0.2,0.3\n0.4,0.5,0.6\n");
  auto ds = load_csv(path.string(), "idx");
  CHECK(ds.dates.empty());
  CHECK(ds.periods() == 2);
  CHECK(ds.assets() == 2);
  CHECK(ds.index_returns[1] == 0.4);
  CHECK(ds.returns(1, 1) == 0.6);
}

TEST_CASE("load_csv reports what is wrong with a malformed file") {
  CHECK_THROWS_AS(load_csv("definitely_missing.csv", "spx"), IoError);

  auto empty = scratch_file("empty.csv", "");
  CHECK_THROWS_AS(load_csv(empty.string(), "spx"), InvalidInputError);

  auto ragged = scratch_file("ragged.csv", "a,b\n1,2\n3\n");
  const auto ragged_msg =
      thrown_message([&] { load_csv(ragged.string(), "a"); });
  CHECK(ragged_msg.find("line 3") != std::string::npos);
  CHECK(ragged_msg.find("expected 2") != std::string::npos);

  auto textual =
      scratch_file("textual.csv", "a,b\n1,oops\n2,3\nnope,4\n");
  const auto textual_msg =
      thrown_message([&] { load_csv(textual.string(), "a"); });
  CHECK(textual_msg.find("2") != std::string::npos);
  CHECK(textual_msg.find("4") != std::string::npos);

  auto plain = scratch_file("plain.csv", "a,b\n1,2\n");
  const auto missing_msg =
      thrown_message([&] { load_csv(plain.string(), "zzz"); });
  CHECK(missing_msg.find("zzz") != std::string::npos);
  CHECK(missing_msg.find("a") != std::string::npos);
  CHECK(missing_msg.find("b") != std::string::npos);

  auto headeronly = scratch_file("headeronly.csv", "a,b\n");
  CHECK_THROWS_AS(load_csv(headeronly.string(), "a"), InvalidInputError);
}

TEST_CASE("center_split centers both blocks with training statistics") {
  auto ds = load_csv(kFixture, "spx");
  SplitSpec spec;
  spec.train_len = 8;
  auto split = center_split(ds, spec);
  CHECK(split.x_train.rows() == 8);
  CHECK(split.x_test.rows() == 4);
  CHECK(split.x_train.cols() == 3);
  CHECK(split.y_train.size() == 8);
  CHECK(split.y_test.size() == 4);

  for (std::size_t j = 0; j < 3; ++j) {
    double m = 0.0;
    for (std::size_t t = 0; t < 8; ++t) m += split.x_train(t, j);
    CHECK(std::abs(m / 8.0) <= 1e-12);
    // the held-out block is shifted by the training mean, not its own
    CHECK(split.x_test(0, j) ==
          doctest::Approx(ds.returns(8, j) - split.column_means[j]).epsilon(1e-15));
  }
  double my = 0.0;
  for (double v : split.y_train) my += v;
  CHECK(std::abs(my / 8.0) <= 1e-12);
  CHECK(split.y_test[3] == doctest::Approx(ds.index_returns[11] - split.y_mean));
}

TEST_CASE("center_split can leave the data untouched") {
  auto ds = load_csv(kFixture, "spx");
  SplitSpec spec;
  spec.train_len = 8;
  spec.centering = Centering::none;
  auto split = center_split(ds, spec);
  CHECK(split.x_train(0, 0) == ds.returns(0, 0));
  CHECK(split.y_test[0] == ds.index_returns[8]);
  CHECK(split.y_mean == 0.0);
  for (double m : split.column_means) CHECK(m == 0.0);
}

TEST_CASE("center_split rejects a split with an empty side") {
  auto ds = load_csv(kFixture, "spx");
  SplitSpec spec;
  spec.train_len = 0;
  CHECK_THROWS_AS(center_split(ds, spec), InvalidInputError);
  spec.train_len = 12;
  CHECK_THROWS_AS(center_split(ds, spec), InvalidInputError);
  spec.train_len = 11;
  CHECK_NOTHROW(center_split(ds, spec));
}

TEST_CASE("synth_instance is reproducible and validates its arguments") {
  auto a = synth_instance(99, 40, 6, 3, 0.01);
  auto b = synth_instance(99, 40, 6, 3, 0.01);
  CHECK(a.y == b.y);
  CHECK(a.true_w == b.true_w);
  for (std::size_t t = 0; t < 40; ++t) {
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(a.x(t, j) == b.x(t, j));
    }
  }
  auto c = synth_instance(100, 40, 6, 3, 0.01);
  CHECK(a.y != c.y);

  std::size_t nnz = 0;
  for (double v : a.true_w)
    if (v != 0.0) ++nnz;
  CHECK(nnz == 3);

  CHECK_THROWS_AS(synth_instance(1, 0, 4, 2, 0.0), InvalidInputError);
  CHECK_THROWS_AS(synth_instance(1, 10, 0, 0, 0.0), InvalidInputError);
  CHECK_THROWS_AS(synth_instance(1, 10, 4, 5, 0.0), InvalidInputError);
  CHECK_THROWS_AS(synth_instance(1, 10, 4, 2, -0.5), InvalidInputError);
}

TEST_CASE("synth_instance without noise is exactly recoverable") {
  auto inst = synth_instance(7, 200, 8, 3, 0.0);
  SolverOptions opts;
  opts.lambda = 1e-6;
  opts.tol = 1e-10;
  opts.max_iter = 200000;
  auto fit = lasso_ista(inst.x, inst.y, opts);
  REQUIRE(fit.converged);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(std::abs(fit.weights[j] - inst.true_w[j]) <= 1e-4);
  }
}

TEST_CASE("synth_instance with sparsity 0 is pure noise") {
  auto inst = synth_instance(5, 30, 4, 0, 0.02);
  for (double v : inst.true_w) CHECK(v == 0.0);
  CHECK(norm2(inst.y) > 0.0);
}

TEST_CASE("synth_dataset wraps the instance in dataset form") {
  auto ds = synth_dataset(11, 25, 5, 2, 0.01);
  CHECK(ds.periods() == 25);
  CHECK(ds.assets() == 5);
  CHECK(ds.index_name == "index");
  CHECK(ds.asset_names.front() == "asset_1");
  CHECK(ds.asset_names.back() == "asset_5");
  CHECK(ds.dates.front() == "t1");
  CHECK(ds.source_path == "synthetic");

  // the dataset view carries the same draw as the instance view
  auto inst = synth_instance(11, 25, 5, 2, 0.01);
  CHECK(ds.index_returns == inst.y);
  CHECK(ds.returns(3, 2) == inst.x(3, 2));
}
