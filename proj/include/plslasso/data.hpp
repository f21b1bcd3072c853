#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "plslasso/linalg.hpp"

namespace plslasso {

//! A panel of asset returns next to the index they should track. Rows are
//! consecutive observation periods.
struct TrackingDataset {
  std::vector<std::string> asset_names;
  std::string index_name;
  Matrix returns;          //!< T x d asset returns
  Vector index_returns;    //!< length T
  std::string source_path;
  std::vector<std::string> dates;  //!< optional row labels, metadata only

  std::size_t periods() const { return index_returns.size(); }
  std::size_t assets() const { return returns.cols(); }
};

enum class Centering { train_stats, none };

struct SplitSpec {
  std::size_t train_len = 400;
  Centering centering = Centering::train_stats;
};

//! Train/test blocks after a positional split. When centering is enabled the
//! test block is shifted by the training means, never by its own.
struct CenteredSplit {
  Matrix x_train;
  Vector y_train;
  Matrix x_test;
  Vector y_test;
  Vector column_means;  //!< training column means that were subtracted
  double y_mean = 0.0;
};

//! Reads a comma-separated return panel: header row, an optional leading
//! "date" column kept as row labels, one column named `index_column`, and
//! numeric asset columns for the rest. Malformed rows are reported with
//! their line numbers.
TrackingDataset load_csv(const std::string& path, const std::string& index_column);

//! Writes a dataset in the same format load_csv reads, with shortest
//! round-trip number formatting so a reload reproduces the values exactly.
void write_csv(const TrackingDataset& ds, const std::string& path);

CenteredSplit center_split(const TrackingDataset& ds, const SplitSpec& spec);

struct SynthInstance {
  Matrix x;
  Vector y;
  Vector true_w;
};

//! Deterministic synthetic regression instance: standard-normal X, a weight
//! vector with `sparsity` nonzeros drawn from {+-1, +-2}, additive Gaussian
//! noise, and both X and y centered afterwards.
SynthInstance synth_instance(std::uint64_t seed, std::size_t n, std::size_t d,
                             std::size_t sparsity, double noise_sd);

//! Same generator wrapped as a TrackingDataset (y becomes the index).
TrackingDataset synth_dataset(std::uint64_t seed, std::size_t n, std::size_t d,
                              std::size_t sparsity, double noise_sd);

}  // namespace plslasso
