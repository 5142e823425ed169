#include "funnel/training/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include "funnel/diff/ops.hpp"

namespace funnel::training {

using diff::Rng;
using diff::Var;
using nlohmann::json;

void adam_step(ParamStore& store, double lr, const AdamConfig& config) {
  const std::size_t t = store.step() + 1;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (auto& p : store.entries()) {
    if (!p.trainable) continue;
    const Tensor& g = p.var.grad();
    if (g.empty()) continue;
    Tensor& w = p.var.mutable_value();
    if (p.m.size() != w.size()) {
      p.m = Tensor(w.shape());
      p.v = Tensor(w.shape());
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      p.m[i] = config.beta1 * p.m[i] + (1.0 - config.beta1) * g[i];
      p.v[i] = config.beta2 * p.v[i] + (1.0 - config.beta2) * g[i] * g[i];
      w[i] -= lr * (p.m[i] / c1) / (std::sqrt(p.v[i] / c2) + config.eps);
    }
  }
  store.set_step(t);
}

double cosine_lr(double base_lr, std::size_t step, std::size_t total) {
  if (total == 0 || step > total) return 0.0;
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / static_cast<double>(total)));
}

double gradient_norm(const ParamStore& store) {
  double sq = 0.0;
  for (const auto& p : store.entries()) {
    if (!p.trainable) continue;
    for (double g : p.var.grad().values()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_gradients(ParamStore& store, double max_norm) {
  const double norm = gradient_norm(store);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& p : store.entries()) {
      if (!p.trainable || p.var.grad().empty()) continue;
      for (double& g : p.var.mutable_grad().values()) g *= scale;
    }
  }
  return norm;
}

TrainConfig TrainConfig::from_json(const json& j) {
  static const std::set<std::string> keys = {"batch_size", "total_steps",         "base_lr", "clip_norm", "seed",
                                             "dropout",    "validation_interval", "dataset", "model"};
  if (!j.is_object()) throw std::invalid_argument("train config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw std::invalid_argument("train config: unknown key '" + key + "'");
  }
  TrainConfig c;
  c.batch_size = j.value("batch_size", c.batch_size);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.base_lr = j.value("base_lr", c.base_lr);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.seed = j.value("seed", c.seed);
  c.validation_interval = j.value("validation_interval", c.validation_interval);
  c.dropout = j.value("dropout", c.dropout);
  c.dataset = j.at("dataset");
  if (j.contains("model")) c.model = models::ModelSpec::from_json(j.at("model"));
  c.validate();
  return c;
}

json TrainConfig::to_json() const {
  return json{{"batch_size", batch_size},
              {"total_steps", total_steps},
              {"base_lr", base_lr},
              {"clip_norm", clip_norm},
              {"seed", seed},
              {"validation_interval", validation_interval},
              {"dropout", dropout},
              {"dataset", dataset},
              {"model", model.to_json()}};
}

void TrainConfig::validate() const {
  if (total_steps == 0) throw std::invalid_argument("train config: total_steps must be positive");
  if (!(base_lr > 0.0)) throw std::invalid_argument("train config: base_lr must be positive");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("train config: clip_norm must be positive");
  if (batch_size == 0) throw std::invalid_argument("train config: batch_size must be positive");
  if (validation_interval == 0) throw std::invalid_argument("train config: validation_interval must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("train config: dropout must be in [0, 1)");
}

double mean_objective(const models::DensityModel& model, const Tensor& x, std::size_t chunk) {
  diff::NoGradGuard guard;
  double total = 0.0;
  for (std::size_t begin = 0; begin < x.dim(0); begin += chunk) {
    const std::size_t end = std::min(x.dim(0), begin + chunk);
    const Var ll = model.objective(diff::constant(x.row_range(begin, end)), {});
    for (double v : ll.value().values()) total += v;
  }
  return total / static_cast<double>(x.dim(0));
}

namespace {

void append_metrics(const std::filesystem::path& path, const MetricsRow& row, bool header) {
  std::ofstream out(path, header ? std::ios::trunc : std::ios::app);
  if (!out) throw std::runtime_error("cannot write metrics log " + path.string());
  if (header) {
    out << "step,lr,train_loss,val_ll\n";
    return;
  }
  out.precision(17);
  out << row.step << ',' << row.lr << ',' << row.train_loss << ',' << row.val_ll << '\n';
}

}  // namespace

TrainResult train(const TrainConfig& config, models::BuiltModel& built, const data::LoadedDataset& data,
                  const TrainOptions& options) {
  ParamStore& store = *built.store;
  const models::DensityModel& model = *built.model;
  const Tensor& x_train = data.split.train;
  const Tensor& x_val = data.split.val;
  const std::size_t n = x_train.dim(0);
  if (n == 0) throw std::invalid_argument("train: empty training split");
  const std::size_t batch = std::min(config.batch_size, n);

  const Rng root(config.seed);
  Rng shuffle = root.fork(3), noise = root.fork(4), step_rng = root.fork(5);
  std::vector<std::size_t> order;
  std::size_t cursor = n;

  if (!options.metrics_path.empty()) append_metrics(options.metrics_path, {}, true);

  TrainResult result;
  std::vector<Tensor> best = store.snapshot(), last_good = best;
  double last_loss = 0.0;

  for (std::size_t step = 1; step <= config.total_steps; ++step) {
    if (cursor + batch > n) {
      order = shuffle.permutation(n);
      cursor = 0;
    }
    Tensor xb = x_train.take_rows(std::span<const std::size_t>(order).subspan(cursor, batch));
    cursor += batch;
    if (data.bits > 0) xb = data::redequantize(xb, data.bits, noise);

    const double lr = cosine_lr(config.base_lr, step - 1, config.total_steps);
    store.zero_grad();
    const Var loss = -diff::mean(model.objective(diff::constant(xb), {true, &step_rng}));
    last_loss = loss.item();
    if (!std::isfinite(last_loss)) {
      result.aborted = true;
      result.diagnostic = "non-finite training loss at step " + std::to_string(step) + "; restored the last good parameters";
      store.restore(last_good);
      break;
    }
    diff::backward(loss);
    clip_gradients(store, config.clip_norm);
    adam_step(store, lr);

    if (step % config.validation_interval == 0 || step == config.total_steps) {
      MetricsRow row{step, lr, last_loss, mean_objective(model, x_val)};
      result.metrics.push_back(row);
      if (!options.metrics_path.empty()) append_metrics(options.metrics_path, row, false);
      if (options.on_log) options.on_log(row);
      if (!std::isfinite(row.val_ll)) {
        result.aborted = true;
        result.diagnostic = "non-finite validation log-likelihood at step " + std::to_string(step) +
                            "; restored the last good parameters";
        store.restore(last_good);
        break;
      }
      last_good = store.snapshot();
      if (row.val_ll > result.best_val_ll) {
        result.best_val_ll = row.val_ll;
        result.best_step = step;
        best = last_good;
      }
    }
  }
  if (!result.aborted || result.best_step > 0) store.restore(best);
  return result;
}

RunOutput run_training(const TrainConfig& config, const std::filesystem::path& base_dir,
                       const std::filesystem::path& out_dir) {
  config.validate();
  const data::LoadedDataset data = data::load_dataset(config.dataset, base_dir, config.seed);
  models::ModelSpec spec = config.model;
  if (spec.image_shape.empty() && !data.image_shape.empty()) spec.image_shape = data.image_shape;
  models::BuiltModel built = models::build_model(spec, data.split.dim(), config.seed, config.dropout);

  std::filesystem::create_directories(out_dir);
  RunOutput out;
  out.metrics = out_dir / "metrics.csv";
  out.checkpoint = out_dir / "model.ckpt";
  {
    std::ofstream cfg(out_dir / "config.json");
    cfg << config.to_json().dump(2) << '\n';
  }
  out.result = train(config, built, data, {out.metrics, {}});
  json info = {{"dataset", data.name},
               {"bits", data.bits},
               {"best_step", out.result.best_step},
               {"best_val_ll", out.result.best_val_ll}};
  if (!data.image_shape.empty()) info["image_shape"] = data.image_shape;
  models::save_checkpoint(out.checkpoint, models::make_checkpoint(built, data.split.standardization, info));
  return out;
}

}  // namespace funnel::training
