#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>

#include "funnel/data/dataset.hpp"
#include "funnel/models/checkpoint.hpp"

namespace funnel::training {

using diff::ParamStore;
using diff::Tensor;

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update of every trainable parameter; advances the
/// store's step counter.
void adam_step(ParamStore& store, double lr, const AdamConfig& config = {});

/// base_lr * (1 + cos(pi * step / total)) / 2; zero past the end.
double cosine_lr(double base_lr, std::size_t step, std::size_t total);

/// Rescales all gradients so their global L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_gradients(ParamStore& store, double max_norm = 5.0);
double gradient_norm(const ParamStore& store);

struct TrainConfig {
  std::size_t batch_size = 256;
  std::size_t total_steps = 1000;
  double base_lr = 5e-4;
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  std::size_t validation_interval = 100;
  double dropout = 0.0;
  nlohmann::json dataset;
  models::ModelSpec model;

  /// Keys must match the fields exactly; unknown keys are rejected.
  static TrainConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct MetricsRow {
  std::size_t step = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_ll = 0.0;
};

struct TrainResult {
  std::vector<MetricsRow> metrics;
  std::size_t best_step = 0;
  double best_val_ll = -std::numeric_limits<double>::infinity();
  bool aborted = false;
  std::string diagnostic;
};

struct TrainOptions {
  /// Metrics CSV, appended as rows are logged; empty to skip.
  std::filesystem::path metrics_path;
  /// Called after each logged row.
  std::function<void(const MetricsRow&)> on_log;
};

/// Mean per-row objective over `x` in evaluation mode, in chunks.
double mean_objective(const models::DensityModel& model, const Tensor& x, std::size_t chunk = 1024);

/// Minibatch training. On return the model holds the parameters with the best
/// validation score (the initial ones if no validation improved on them). A
/// non-finite loss stops training with `aborted` set.
TrainResult train(const TrainConfig& config, models::BuiltModel& model, const data::LoadedDataset& data,
                  const TrainOptions& options = {});

/// Loads the dataset, builds the model, trains, and writes `model.ckpt`,
/// `metrics.csv` and `config.json` into `out_dir`.
struct RunOutput {
  TrainResult result;
  std::filesystem::path checkpoint, metrics;
};
RunOutput run_training(const TrainConfig& config, const std::filesystem::path& base_dir,
                       const std::filesystem::path& out_dir);

}  // namespace funnel::training
