#include "plslasso/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "plslasso/errors.hpp"

namespace plslasso {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

bool parse_real(const std::string& cell, double& out) {
  const std::string t = trimmed(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

std::string shortest_repr(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// Small deterministic normal sampler: raw engine bits mapped to (0,1] and
// pushed through a Box-Muller cosine, so the stream is identical on every
// platform (the standard pins mt19937_64 output but not the distributions).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // in (0, 1]
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  std::uint64_t integer(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

TrackingDataset load_csv(const std::string& path, const std::string& index_column) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw InvalidInputError("load_csv: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_line(line);
  for (std::string& h : header) h = trimmed(h);

  const bool has_date = !header.empty() && header.front() == "date";
  std::size_t index_pos = header.size();
  for (std::size_t i = has_date ? 1 : 0; i < header.size(); ++i)
    if (header[i] == index_column) {
      index_pos = i;
      break;
    }
  if (index_pos == header.size()) {
    std::vector<std::string> available(header.begin() + (has_date ? 1 : 0),
                                       header.end());
    throw InvalidInputError("load_csv: no column named '" + index_column +
                            "' in '" + path + "' (available: " +
                            join(available, ", ") + ")");
  }

  TrackingDataset ds;
  ds.source_path = path;
  ds.index_name = header[index_pos];
  for (std::size_t i = has_date ? 1 : 0; i < header.size(); ++i)
    if (i != index_pos) ds.asset_names.push_back(header[i]);

  std::vector<Vector> rows;
  Vector index_vals;
  std::vector<std::size_t> bad_lines;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "load_csv: line " << line_no << " of '" << path << "' has "
         << cells.size() << " cells, expected " << header.size();
      throw InvalidInputError(os.str());
    }
    Vector row;
    row.reserve(ds.asset_names.size());
    double index_val = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (has_date && i == 0) continue;
      double v;
      if (!parse_real(cells[i], v)) {
        ok = false;
        break;
      }
      if (i == index_pos)
        index_val = v;
      else
        row.push_back(v);
    }
    if (!ok) {
      bad_lines.push_back(line_no);
      continue;
    }
    if (has_date) ds.dates.push_back(trimmed(cells[0]));
    rows.push_back(std::move(row));
    index_vals.push_back(index_val);
  }
  if (!bad_lines.empty()) {
    std::ostringstream os;
    os << "load_csv: non-numeric cells in '" << path << "' at line"
       << (bad_lines.size() > 1 ? "s " : " ");
    for (std::size_t i = 0; i < bad_lines.size(); ++i)
      os << (i ? ", " : "") << bad_lines[i];
    throw InvalidInputError(os.str());
  }
  if (rows.empty())
    throw InvalidInputError("load_csv: '" + path + "' has no data rows");

  ds.returns = Matrix(rows.size(), ds.asset_names.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ds.asset_names.size(); ++j)
      ds.returns(i, j) = rows[i][j];
  ds.index_returns = std::move(index_vals);
  return ds;
}

void write_csv(const TrackingDataset& ds, const std::string& path) {
  if (ds.periods() != ds.returns.rows() ||
      ds.assets() != ds.asset_names.size())
    throw DimensionError("write_csv: dataset fields disagree on shape");
  std::ofstream out(path);
  if (!out) throw IoError("write_csv: cannot open '" + path + "' for writing");

  const bool with_dates = ds.dates.size() == ds.periods();
  if (with_dates) out << "date,";
  out << ds.index_name;
  for (const std::string& name : ds.asset_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < ds.periods(); ++i) {
    if (with_dates) out << ds.dates[i] << ',';
    out << shortest_repr(ds.index_returns[i]);
    for (std::size_t j = 0; j < ds.assets(); ++j)
      out << ',' << shortest_repr(ds.returns(i, j));
    out << '\n';
  }
  if (!out) throw IoError("write_csv: failed writing '" + path + "'");
}

CenteredSplit center_split(const TrackingDataset& ds, const SplitSpec& spec) {
  const std::size_t t = ds.periods();
  if (spec.train_len == 0 || spec.train_len >= t) {
    std::ostringstream os;
    os << "center_split: train_len must be in (0, " << t << "), got "
       << spec.train_len;
    throw InvalidInputError(os.str());
  }
  const std::size_t d = ds.assets();
  const std::size_t n_train = spec.train_len;
  const std::size_t n_test = t - n_train;

  CenteredSplit out;
  out.x_train = Matrix(n_train, d);
  out.x_test = Matrix(n_test, d);
  out.y_train.assign(n_train, 0.0);
  out.y_test.assign(n_test, 0.0);
  out.column_means.assign(d, 0.0);

  if (spec.centering == Centering::train_stats) {
    for (std::size_t j = 0; j < d; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < n_train; ++i) m += ds.returns(i, j);
      out.column_means[j] = m / static_cast<double>(n_train);
    }
    double ym = 0.0;
    for (std::size_t i = 0; i < n_train; ++i) ym += ds.index_returns[i];
    out.y_mean = ym / static_cast<double>(n_train);
  }

  for (std::size_t i = 0; i < n_train; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      out.x_train(i, j) = ds.returns(i, j) - out.column_means[j];
    out.y_train[i] = ds.index_returns[i] - out.y_mean;
  }
  for (std::size_t i = 0; i < n_test; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      out.x_test(i, j) = ds.returns(n_train + i, j) - out.column_means[j];
    out.y_test[i] = ds.index_returns[n_train + i] - out.y_mean;
  }
  return out;
}

SynthInstance synth_instance(std::uint64_t seed, std::size_t n, std::size_t d,
                             std::size_t sparsity, double noise_sd) {
  if (n == 0 || d == 0)
    throw InvalidInputError("synth_instance: n and d must be positive");
  if (sparsity > d)
    throw InvalidInputError("synth_instance: sparsity cannot exceed d");
  if (!(noise_sd >= 0.0))
    throw InvalidInputError("synth_instance: noise_sd must be nonnegative");

  NormalSampler rng(seed);
  SynthInstance inst;
  inst.x = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) inst.x(i, j) = rng.normal();

  inst.true_w.assign(d, 0.0);
  std::vector<std::size_t> perm(d);
  for (std::size_t j = 0; j < d; ++j) perm[j] = j;
  for (std::size_t j = d - 1; j > 0; --j)
    std::swap(perm[j], perm[rng.integer(j + 1)]);
  static constexpr double kLevels[4] = {-2.0, -1.0, 1.0, 2.0};
  for (std::size_t k = 0; k < sparsity; ++k)
    inst.true_w[perm[k]] = kLevels[rng.integer(4)];

  inst.y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < d; ++j) v += inst.x(i, j) * inst.true_w[j];
    inst.y[i] = v + noise_sd * rng.normal();
  }

  // center columns and response so the generated data matches the
  // assumptions the solvers are benchmarked under
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += inst.x(i, j);
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) inst.x(i, j) -= m;
  }
  double ym = 0.0;
  for (double v : inst.y) ym += v;
  ym /= static_cast<double>(n);
  for (double& v : inst.y) v -= ym;
  return inst;
}

TrackingDataset synth_dataset(std::uint64_t seed, std::size_t n, std::size_t d,
                              std::size_t sparsity, double noise_sd) {
  SynthInstance inst = synth_instance(seed, n, d, sparsity, noise_sd);
  TrackingDataset ds;
  ds.index_name = "index";
  ds.asset_names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::ostringstream os;
    os << "asset_" << (j + 1);
    ds.asset_names.push_back(os.str());
  }
  ds.returns = std::move(inst.x);
  ds.index_returns = std::move(inst.y);
  ds.dates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream os;
    os << "t" << (i + 1);
    ds.dates.push_back(os.str());
  }
  ds.source_path = "synthetic";
  return ds;
}

}  // namespace plslasso
