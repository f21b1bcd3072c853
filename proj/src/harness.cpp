#include "plslasso/harness.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>

#include <json.hpp>

#include "plslasso/diagnostics.hpp"
#include "plslasso/errors.hpp"
#include "plslasso/version.hpp"

namespace plslasso {

namespace {

constexpr const char* kCsvHeader =
    "method,lambda,mu,cardinality,train_rmse,test_rmse,iterations,converged";

// shortest decimal form that parses back to the same double
std::string shortest_repr(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("failed to format a number");
  return std::string(buf, ptr);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_real_cell(const std::string& cell, const char* what) {
  double v = 0.0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw InvalidInputError(std::string("results file: bad ") + what +
                            " value '" + cell + "'");
  return v;
}

std::size_t parse_count_cell(const std::string& cell, const char* what) {
  std::size_t v = 0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw InvalidInputError(std::string("results file: bad ") + what +
                            " value '" + cell + "'");
  return v;
}

std::string centering_name(Centering c) {
  return c == Centering::train_stats ? "train_stats" : "none";
}

bool is_v1_family(Method m) {
  return m == Method::v1_ista || m == Method::v1_dr;
}

FitResult fit_cell(Method m, const Matrix& x, const Vector& y,
                   const SolverOptions& opts) {
  switch (m) {
    case Method::lasso_ista:
      return lasso_ista(x, y, opts);
    case Method::v1_ista:
      return v1_ista(x, y, opts);
    case Method::v1_dr:
      return v1_dr(x, y, opts);
    case Method::v2:
      return v2_solve(x, y, opts);
    default:
      throw InvalidInputError("run_sweep: method " + to_string(m) +
                              " is not part of the sweep protocol");
  }
}

}  // namespace

MuPolicy MuPolicy::fixed(double mu) { return {Kind::fixed, mu}; }

MuPolicy MuPolicy::fraction(double frac) { return {Kind::fraction, frac}; }

double MuPolicy::resolve(const Vector& y_train) const {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw InvalidInputError("mu policy: setting must be finite and nonnegative");
  if (kind == Kind::fixed) return value;
  const double y_sq = dot(y_train, y_train);
  if (y_sq == 0.0)
    throw InvalidInputError(
        "mu policy: training response is identically zero, the fraction rule "
        "has no scale to work with");
  return value / y_sq;
}

std::string MuPolicy::describe() const {
  return (kind == Kind::fixed ? "fixed " : "fraction ") + shortest_repr(value);
}

void SweepSpec::validate() const {
  if (methods.empty())
    throw InvalidInputError("sweep: at least one method is required");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const Method m = methods[i];
    if (m != Method::lasso_ista && m != Method::v1_ista &&
        m != Method::v1_dr && m != Method::v2)
      throw InvalidInputError("sweep: method " + to_string(m) +
                              " does not take a lambda grid");
    for (std::size_t j = i + 1; j < methods.size(); ++j)
      if (methods[j] == m)
        throw InvalidInputError("sweep: method " + to_string(m) +
                                " listed twice");
  }
  if (lambda_grid.empty())
    throw InvalidInputError("sweep: lambda grid is empty");
  for (double v : lambda_grid)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidInputError("sweep: lambda grid must be strictly positive");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] < lambda_grid[i - 1]))
      throw InvalidInputError("sweep: lambda grid must be strictly descending");
  solver_opts.validate();
}

double rmse(const Vector& pred, const Vector& actual) {
  if (pred.size() != actual.size())
    throw DimensionError("rmse: prediction and target lengths differ");
  if (pred.empty()) throw InvalidInputError("rmse: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

Vector default_lambda_grid(const Matrix& x_train, const Vector& y_train,
                           std::size_t count, double decades) {
  if (count < 2)
    throw InvalidInputError("default_lambda_grid: count must be at least 2");
  if (!(decades > 0.0))
    throw InvalidInputError("default_lambda_grid: decades must be positive");
  if (x_train.rows() != y_train.size())
    throw DimensionError("default_lambda_grid: X rows and y length differ");
  const double lambda_max = norm_inf(matvec_transposed(x_train, y_train));
  if (!(lambda_max > 0.0))
    throw DegenerateDirectionError(
        "default_lambda_grid: X^T y = 0, every positive lambda is already "
        "past the null-solution threshold");
  Vector grid(count);
  const double denom = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] =
        lambda_max * std::pow(10.0, -decades * static_cast<double>(i) / denom);
  }
  return grid;
}

std::vector<SweepRecord> run_sweep(const TrackingDataset& ds,
                                   const SweepSpec& spec) {
  spec.validate();
  const CenteredSplit split = center_split(ds, spec.split);

  // the Gram pieces are shared by every cell of the step-size precomputation
  const Matrix g = gram(split.x_train);
  const Vector c = matvec_transposed(split.x_train, split.y_train);

  std::vector<SweepRecord> records;
  records.reserve(spec.methods.size() * spec.lambda_grid.size());

  for (Method m : spec.methods) {
    SolverOptions base = spec.solver_opts;
    std::optional<double> mu;
    if (is_v1_family(m)) {
      mu = spec.mu_policy.resolve(split.y_train);
      base.mu = *mu;
    } else {
      base.mu = 0.0;
    }
    // one power iteration per method instead of one per cell; the solvers
    // would arrive at the same value themselves
    if ((m == Method::lasso_ista || m == Method::v1_ista) &&
        !base.step_size.has_value()) {
      Matrix q = g;
      if (base.mu != 0.0) add_scaled_outer(q, c, -base.mu);
      const double lip = spectral_norm_sym(q);
      if (lip > 0.0) base.step_size = 1.0 / (lip * (1.0 + 1e-6));
    }

    for (double lambda : spec.lambda_grid) {
      SolverOptions opts = base;
      opts.lambda = lambda;
      SweepRecord rec;
      rec.method = m;
      rec.lambda = lambda;
      rec.mu = mu;
      try {
        FitResult fit = fit_cell(m, split.x_train, split.y_train, opts);
        rec.cardinality = cardinality(fit.weights);
        rec.train_rmse = rmse(matvec(split.x_train, fit.weights), split.y_train);
        rec.test_rmse = rmse(matvec(split.x_test, fit.weights), split.y_test);
        rec.iterations = fit.iterations;
        rec.converged = fit.converged;
      } catch (const Error& e) {
        rec.error = e.what();
        rec.converged = false;
        rec.train_rmse = std::numeric_limits<double>::quiet_NaN();
        rec.test_rmse = std::numeric_limits<double>::quiet_NaN();
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

SweepMeta make_meta(const TrackingDataset& ds, const SweepSpec& spec) {
  SweepMeta meta;
  meta.dataset = std::filesystem::path(ds.source_path).stem().string();
  if (meta.dataset.empty()) meta.dataset = "dataset";
  meta.train_len = spec.split.train_len;
  meta.test_len =
      ds.periods() > meta.train_len ? ds.periods() - meta.train_len : 0;
  meta.centering = spec.split.centering;
  meta.mu_policy = spec.mu_policy;
  meta.solver_opts = spec.solver_opts;
  meta.version = kVersion;
  return meta;
}

std::string render_results_csv(const std::vector<SweepRecord>& records,
                               const SweepMeta& meta) {
  if (records.empty())
    throw InvalidInputError("emit_results: no records to write");
  std::string out;
  out += "# plslasso sweep results\n";
  out += "# version: " + meta.version + "\n";
  out += "# dataset: " + meta.dataset + "\n";
  out += "# train_len: " + std::to_string(meta.train_len) + "\n";
  out += "# test_len: " + std::to_string(meta.test_len) + "\n";
  out += "# centering: " + centering_name(meta.centering) + "\n";
  out += "# mu_policy: " + meta.mu_policy.describe() + "\n";
  out += "# rho: " + shortest_repr(meta.solver_opts.rho) + "\n";
  out += "# tol: " + shortest_repr(meta.solver_opts.tol) + "\n";
  out += "# max_iter: " + std::to_string(meta.solver_opts.max_iter) + "\n";
  out += "# init_ridge: " + shortest_repr(meta.solver_opts.init_ridge) + "\n";
  out += kCsvHeader;
  out += '\n';
  for (const SweepRecord& r : records) {
    out += to_string(r.method);
    out += ',';
    out += shortest_repr(r.lambda);
    out += ',';
    if (r.mu.has_value()) out += shortest_repr(*r.mu);
    out += ',';
    out += std::to_string(r.cardinality);
    out += ',';
    out += shortest_repr(r.train_rmse);
    out += ',';
    out += shortest_repr(r.test_rmse);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += r.converged ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string render_results_json(const std::vector<SweepRecord>& records,
                                const SweepMeta& meta) {
  if (records.empty())
    throw InvalidInputError("emit_results: no records to write");
  nlohmann::json doc;
  doc["metadata"] = {
      {"version", meta.version},
      {"dataset", meta.dataset},
      {"train_len", meta.train_len},
      {"test_len", meta.test_len},
      {"centering", centering_name(meta.centering)},
      {"mu_policy", meta.mu_policy.describe()},
      {"solver",
       {{"rho", meta.solver_opts.rho},
        {"tol", meta.solver_opts.tol},
        {"max_iter", meta.solver_opts.max_iter},
        {"init_ridge", meta.solver_opts.init_ridge}}},
  };
  auto rows = nlohmann::json::array();
  for (const SweepRecord& r : records) {
    nlohmann::json row = {
        {"method", to_string(r.method)},
        {"lambda", r.lambda},
        {"mu", r.mu.has_value() ? nlohmann::json(*r.mu) : nlohmann::json()},
        {"cardinality", r.cardinality},
        {"train_rmse", r.train_rmse},
        {"test_rmse", r.test_rmse},
        {"iterations", r.iterations},
        {"converged", r.converged},
    };
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  doc["records"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void emit_results(const std::vector<SweepRecord>& records, const SweepMeta& meta,
                  const std::string& format, const std::string& path) {
  std::string body;
  if (format == "csv") {
    body = render_results_csv(records, meta);
  } else if (format == "json") {
    body = render_results_json(records, meta);
  } else {
    throw InvalidInputError("emit_results: format must be csv or json, got '" +
                            format + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_results: cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("emit_results: failed writing '" + path + "'");
}

std::vector<SweepRecord> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_results_csv: cannot open '" + path + "'");
  std::string line;
  bool saw_header = false;
  std::vector<SweepRecord> records;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != kCsvHeader)
        throw InvalidInputError("read_results_csv: unexpected column header '" +
                                line + "'");
      saw_header = true;
      continue;
    }
    const auto cells = split_cells(line);
    if (cells.size() != 8)
      throw InvalidInputError("read_results_csv: line " +
                              std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) +
                              " cells, expected 8");
    SweepRecord r;
    r.method = method_from_string(cells[0]);
    r.lambda = parse_real_cell(cells[1], "lambda");
    if (!cells[2].empty()) r.mu = parse_real_cell(cells[2], "mu");
    r.cardinality = parse_count_cell(cells[3], "cardinality");
    r.train_rmse = parse_real_cell(cells[4], "train_rmse");
    r.test_rmse = parse_real_cell(cells[5], "test_rmse");
    r.iterations = parse_count_cell(cells[6], "iterations");
    if (cells[7] == "true") {
      r.converged = true;
    } else if (cells[7] == "false") {
      r.converged = false;
    } else {
      throw InvalidInputError("read_results_csv: bad converged value '" +
                              cells[7] + "'");
    }
    records.push_back(std::move(r));
  }
  if (!saw_header)
    throw InvalidInputError("read_results_csv: no header row in '" + path + "'");
  return records;
}

std::vector<ParetoFlag> pareto_dominance_flags(
    const std::vector<SweepRecord>& records) {
  std::vector<const SweepRecord*> v2_pts;
  for (const SweepRecord& r : records)
    if (r.method == Method::v2 && r.converged && std::isfinite(r.test_rmse))
      v2_pts.push_back(&r);
  std::vector<ParetoFlag> flags;
  for (const SweepRecord& r : records) {
    if (r.method != Method::lasso_ista || !r.converged ||
        !std::isfinite(r.test_rmse))
      continue;
    ParetoFlag f;
    f.lambda = r.lambda;
    f.test_rmse = r.test_rmse;
    f.cardinality = r.cardinality;
    for (const SweepRecord* v : v2_pts) {
      if (v->test_rmse <= r.test_rmse && v->cardinality <= r.cardinality) {
        f.dominated = true;
        break;
      }
    }
    flags.push_back(f);
  }
  return flags;
}

std::string default_output_name(const std::string& dataset,
                                const std::vector<Method>& methods,
                                const std::string& format) {
  if (methods.empty())
    throw InvalidInputError("default_output_name: no methods given");
  if (format != "csv" && format != "json")
    throw InvalidInputError("default_output_name: format must be csv or json");
  const std::string tag = methods.size() == 1 ? to_string(methods[0]) : "all";
  const std::string stem = dataset.empty() ? "dataset" : dataset;
  return stem + "_" + tag + "_sweep." + format;
}

}  // namespace plslasso
