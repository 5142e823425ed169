#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "funnel/diff/rng.hpp"
#include "funnel/diff/tensor.hpp"

namespace funnel::data {

using diff::Rng;
using diff::Tensor;

/// Per-feature affine standardization x' = (x - mean) / scale.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  bool empty() const noexcept { return mean.empty(); }
  /// Statistics of a [rows, features] tensor; throws on a constant column.
  static Standardization fit(const Tensor& x);
  Tensor apply(const Tensor& x) const;
  Tensor invert(const Tensor& x) const;
  /// log |d x' / d x| per row, for reporting densities in original units.
  double log_jacobian() const;
};

struct DatasetSplit {
  Tensor train, val, test;
  Standardization standardization;  // empty when not standardized
  std::size_t dim() const { return train.dim(1); }
};

struct SplitFractions {
  double val = 0.1;
  double test = 0.1;
};

/// Four noisy annuli centred at (+-c, +-c); equal weights, uniform angle,
/// Gaussian radial noise.
struct FourCircles {
  double center = 1.5;
  double radius = 1.0;
  double radial_noise = 0.08;
};

Tensor four_circles(std::size_t n, std::uint64_t seed, const FourCircles& geometry = {});
/// Distance from each row to the nearest annulus centre.
std::vector<double> distance_to_nearest_center(const Tensor& points, const FourCircles& geometry = {});

/// Correlated Gaussian x = mean + L eps with L lower triangular, row-major.
Tensor gaussian_samples(std::size_t n, const std::vector<double>& mean, const std::vector<double>& cholesky,
                        std::uint64_t seed);

/// Numeric CSV: comma separated, '.' decimals, optional header line. Throws
/// std::runtime_error naming row and column for a bad cell.
Tensor read_csv(const std::filesystem::path& path);
/// Header row then rows at 17 significant digits.
void write_csv(const std::filesystem::path& path, const Tensor& rows, const std::vector<std::string>& header = {});

/// Shuffles rows with `seed`, splits train/val/test, and optionally
/// standardizes all splits with train statistics.
DatasetSplit split_rows(const Tensor& rows, bool standardize, std::uint64_t seed, SplitFractions fractions = {});
DatasetSplit load_csv_tabular(const std::filesystem::path& path, bool standardize, std::uint64_t seed = 0,
                              SplitFractions fractions = {});

}  // namespace funnel::data
