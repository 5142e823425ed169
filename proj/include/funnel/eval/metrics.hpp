#pragma once

#include <json.hpp>
#include <optional>

#include "funnel/models/flow_model.hpp"

namespace funnel::eval {

using diff::Tensor;

/// -mean_log_prob / (D ln 2) + bits.
double bits_per_dim(double mean_log_prob_nats, long dims, int bits);

/// bpd_outlier / bpd_inlier.
double anomaly_ratio(double bpd_outlier, double bpd_inlier);

/// Kolmogorov-Smirnov distance between the empirical CDF of all values and
/// the standard normal CDF.
double ks_statistic(std::span<const double> samples);
double normal_cdf(double x);

struct MetricsReport {
  std::string dataset;
  double nats = 0.0;
  double bpd = 0.0;
  std::optional<double> ks;
  std::optional<double> ratio;
  int bits = 0;
  long dims = 0;
  bool exact = true;
  std::uint64_t seed = 0;
  std::vector<std::string> files;

  /// Throws std::logic_error when bpd and nats disagree.
  void check_consistency() const;
  nlohmann::json to_json() const;
};

struct ScoreOptions {
  std::size_t chunk = 1024;
  /// Importance samples for models without an exact likelihood objective
  /// that provide one (the VAE).
  std::size_t importance_samples = 128;
  std::uint64_t seed = 0;
};

/// Per-row log-likelihood (nats) of `x` in evaluation mode. For the VAE this is
/// the importance-sampled estimate; other models use their objective.
Tensor score_rows(const models::DensityModel& model, const Tensor& x, const ScoreOptions& options = {});

double mean(const Tensor& values);

}  // namespace funnel::eval
