#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "plslasso/data.hpp"
#include "plslasso/solvers.hpp"

namespace plslasso {

//! Rule for choosing the covariance weight of the v1 methods on a given
//! training block: either a fixed value, or a fraction of the admissible
//! upper bound 1/||y_train||^2.
struct MuPolicy {
  enum class Kind { fixed, fraction };

  Kind kind = Kind::fraction;
  double value = 0.5;

  static MuPolicy fixed(double mu);
  static MuPolicy fraction(double frac);

  //! Concrete mu for a training response. Throws InvalidInputError for a
  //! negative setting or a zero response under the fraction rule.
  double resolve(const Vector& y_train) const;

  //! Human-readable form used in results metadata, e.g. "fraction 0.5".
  std::string describe() const;
};

//! Everything needed to reproduce a sweep: which methods, which penalty grid,
//! how to pick mu, how to split the data, and the shared solver settings.
struct SweepSpec {
  std::vector<Method> methods{Method::lasso_ista, Method::v1_ista,
                              Method::v1_dr, Method::v2};
  Vector lambda_grid;
  MuPolicy mu_policy;
  SplitSpec split;
  SolverOptions solver_opts;

  //! Throws InvalidInputError unless the grid is non-empty, strictly positive,
  //! strictly descending, and the methods list is a duplicate-free subset of
  //! {lasso_ista, v1_ista, v1_dr, v2}.
  void validate() const;
};

//! One (method, lambda) cell of a sweep. A cell where the solver threw keeps
//! converged = false and carries the message in `error`; its RMSE fields are
//! NaN. Cells are never dropped.
struct SweepRecord {
  Method method = Method::lasso_ista;
  double lambda = 0.0;
  std::optional<double> mu;
  std::size_t cardinality = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string error;
};

//! Provenance block reproduced at the top of every results file so artifacts
//! are self-describing.
struct SweepMeta {
  std::string dataset;
  std::size_t train_len = 0;
  std::size_t test_len = 0;
  Centering centering = Centering::train_stats;
  MuPolicy mu_policy;
  SolverOptions solver_opts;
  std::string version;
};

double rmse(const Vector& pred, const Vector& actual);

//! Log-spaced penalty grid from lambda_max = ||X^T y||_inf down `decades`
//! orders of magnitude. The first entry equals lambda_max exactly, so the
//! largest cell always produces the all-zero Lasso solution.
Vector default_lambda_grid(const Matrix& x_train, const Vector& y_train,
                           std::size_t count = 30, double decades = 4.0);

//! Fits every (method, lambda) cell on the centered training block and scores
//! both blocks. Record order is method-major with lambda descending. Solver
//! errors are captured per record and never abort the sweep.
std::vector<SweepRecord> run_sweep(const TrackingDataset& ds,
                                   const SweepSpec& spec);

//! Metadata describing a sweep of `ds` under `spec`; dataset name is the stem
//! of the source path.
SweepMeta make_meta(const TrackingDataset& ds, const SweepSpec& spec);

std::string render_results_csv(const std::vector<SweepRecord>& records,
                               const SweepMeta& meta);
std::string render_results_json(const std::vector<SweepRecord>& records,
                                const SweepMeta& meta);

//! Writes the rendered results to `path`; `format` is "csv" or "json".
void emit_results(const std::vector<SweepRecord>& records, const SweepMeta& meta,
                  const std::string& format, const std::string& path);

//! Parses a file produced by emit_results in CSV form back into records,
//! ignoring the metadata header.
std::vector<SweepRecord> read_results_csv(const std::string& path);

//! One frontier comparison: a Lasso cell is weakly dominated when some v2 cell
//! does at least as well on both test RMSE and cardinality.
struct ParetoFlag {
  double lambda = 0.0;
  double test_rmse = 0.0;
  std::size_t cardinality = 0;
  bool dominated = false;
};

//! Dominance flags for every converged Lasso record against the converged v2
//! records. Empty when either side is absent.
std::vector<ParetoFlag> pareto_dominance_flags(
    const std::vector<SweepRecord>& records);

//! `<dataset>_<method>_sweep.<ext>`; the method slot is the single method's
//! name, or "all" for a multi-method sweep.
std::string default_output_name(const std::string& dataset,
                                const std::vector<Method>& methods,
                                const std::string& format);

}  // namespace plslasso
