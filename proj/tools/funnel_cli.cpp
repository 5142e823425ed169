#include <CLI11.hpp>
#include <cstring>
#include <fstream>
#include <iostream>

#include "funnel/data/dataset.hpp"
#include "funnel/eval/metrics.hpp"
#include "funnel/models/checkpoint.hpp"
#include "funnel/training/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace funnel;

namespace {

bool is_idx_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char magic[4] = {};
  if (!in.read(reinterpret_cast<char*>(magic), 4)) return false;
  return magic[0] == 0 && magic[1] == 0 && magic[2] == 8 && magic[3] == 3;
}

struct EvalData {
  diff::Tensor x;
  int bits = 0;
};

/// Rows in model space: IDX images are bit-reduced and dequantized, CSV rows
/// get the checkpoint's standardization.
EvalData load_rows(const fs::path& path, const models::Checkpoint& ckpt, int bits, std::uint64_t seed,
                   std::size_t limit) {
  EvalData d;
  if (is_idx_file(path)) {
    d.bits = bits > 0 ? bits : ckpt.info.value("bits", 8);
    if (d.bits <= 0) d.bits = 8;
    d.x = data::dequantize(data::load_idx_subset(path, d.bits, limit), seed);
    return d;
  }
  diff::Tensor rows = data::read_csv(path);
  if (limit > 0 && limit < rows.dim(0)) rows = rows.row_range(0, limit);
  d.x = ckpt.standardization.apply(rows);
  d.bits = bits;
  return d;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<double> encodings_of(const models::DensityModel& model, const diff::Tensor& x, diff::Tensor& latent) {
  latent = model.encode(x);
  return {latent.values().begin(), latent.values().end()};
}

int cmd_train(const fs::path& config_path, fs::path out_dir) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config " + config_path.string());
  const training::TrainConfig config = training::TrainConfig::from_json(json::parse(in));
  if (out_dir.empty()) out_dir = config_path.parent_path() / (config_path.stem().string() + "_run");
  const auto run = training::run_training(config, config_path.parent_path(), out_dir);
  std::cout << "checkpoint " << run.checkpoint.string() << "\nmetrics " << run.metrics.string() << "\nbest_step "
            << run.result.best_step << " val_ll " << run.result.best_val_ll << '\n';
  if (run.result.aborted) {
    std::cerr << "training aborted: " << run.result.diagnostic << '\n';
    return 1;
  }
  return 0;
}

int cmd_eval(const fs::path& ckpt_path, const fs::path& data_path, int bits, const fs::path& out, std::uint64_t seed,
             const fs::path& outlier_path, std::size_t limit) {
  const models::Checkpoint ckpt = models::read_checkpoint(ckpt_path);
  const models::BuiltModel built = models::load_model(ckpt);
  const EvalData d = load_rows(data_path, ckpt, bits, seed, limit);
  const eval::ScoreOptions score{1024, 128, seed};

  eval::MetricsReport report;
  report.dataset = data_path.stem().string();
  report.bits = d.bits;
  report.dims = static_cast<long>(d.x.dim(1));
  report.seed = seed;
  report.exact = built.model->exact();
  report.nats = eval::mean(eval::score_rows(*built.model, d.x, score));
  report.bpd = eval::bits_per_dim(report.nats, report.dims, report.bits);
  diff::Tensor latent;
  report.ks = eval::ks_statistic(encodings_of(*built.model, d.x, latent));
  if (!outlier_path.empty()) {
    const EvalData o = load_rows(outlier_path, ckpt, d.bits, seed, limit);
    const double bpd_out =
        eval::bits_per_dim(eval::mean(eval::score_rows(*built.model, o.x, score)), report.dims, report.bits);
    report.ratio = eval::anomaly_ratio(bpd_out, report.bpd);
  }
  report.files = {ckpt_path.string(), data_path.string()};
  if (!outlier_path.empty()) report.files.push_back(outlier_path.string());
  write_json(out, report.to_json());
  std::cout << report.to_json().dump() << '\n';
  return 0;
}

int cmd_sample(const fs::path& ckpt_path, std::size_t n, double temperature, std::uint64_t seed, const fs::path& out) {
  const models::Checkpoint ckpt = models::read_checkpoint(ckpt_path);
  const models::BuiltModel built = models::load_model(ckpt);
  const diff::Tensor x = ckpt.standardization.invert(built.model->sample(n, temperature, seed));
  data::write_csv(out, x);
  return 0;
}

int cmd_latent(const fs::path& ckpt_path, const fs::path& data_path, const fs::path& out, std::size_t limit) {
  const models::Checkpoint ckpt = models::read_checkpoint(ckpt_path);
  const models::BuiltModel built = models::load_model(ckpt);
  const EvalData d = load_rows(data_path, ckpt, 0, 0, limit);
  diff::Tensor latent;
  const double ks = eval::ks_statistic(encodings_of(*built.model, d.x, latent));
  std::vector<std::string> header;
  for (std::size_t j = 0; j < latent.dim(1); ++j) header.push_back("z" + std::to_string(j));
  data::write_csv(out, latent, header);
  const json summary = {{"ks", ks}, {"rows", latent.dim(0)}, {"latent_dim", latent.dim(1)}, {"file", out.string()}};
  write_json(fs::path(out.string() + ".json"), summary);
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Funnel-layer normalizing flows: train, evaluate, sample, encode"};
  app.require_subcommand(1);

  fs::path config, train_out;
  auto* train = app.add_subcommand("train", "Train a model from a JSON config");
  train->add_option("--config", config, "Training config")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Output directory (default: <config stem>_run next to the config)");

  fs::path ckpt, data_path, out, outlier;
  int bits = 0;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
  auto* ev = app.add_subcommand("eval", "Score a dataset and write a metrics report");
  ev->add_option("--checkpoint", ckpt)->required()->check(CLI::ExistingFile);
  ev->add_option("--data", data_path, "CSV rows or IDX images")->required()->check(CLI::ExistingFile);
  ev->add_option("--bits", bits, "Bit depth of image data (0 for continuous data)")->check(CLI::Range(0, 16));
  ev->add_option("--out", out, "Report JSON")->required();
  ev->add_option("--seed", seed, "Dequantization and importance-sampling seed");
  ev->add_option("--outlier", outlier, "Outlier dataset for the anomaly ratio")->check(CLI::ExistingFile);
  ev->add_option("--limit", limit, "Use only the first N rows");

  std::size_t n = 1000;
  double temperature = 1.0;
  auto* sample = app.add_subcommand("sample", "Draw samples at a temperature");
  sample->add_option("--checkpoint", ckpt)->required()->check(CLI::ExistingFile);
  sample->add_option("--n", n)->check(CLI::PositiveNumber);
  sample->add_option("--temperature", temperature)->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed);
  sample->add_option("--out", out, "Samples CSV")->required();

  auto* latent = app.add_subcommand("latent", "Encode a dataset and report the latent KS statistic");
  latent->add_option("--checkpoint", ckpt)->required()->check(CLI::ExistingFile);
  latent->add_option("--data", data_path)->required()->check(CLI::ExistingFile);
  latent->add_option("--out", out, "Encodings CSV")->required();
  latent->add_option("--limit", limit, "Use only the first N rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*train) return cmd_train(config, train_out);
    if (*ev) return cmd_eval(ckpt, data_path, bits, out, seed, outlier, limit);
    if (*sample) return cmd_sample(ckpt, n, temperature, seed, out);
    if (*latent) return cmd_latent(ckpt, data_path, out, limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
