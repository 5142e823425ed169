#include "funnel/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace funnel::eval {

double bits_per_dim(double mean_log_prob_nats, long dims, int bits) {
  if (dims <= 0) throw std::invalid_argument("bits_per_dim: dimension must be positive");
  return -mean_log_prob_nats / (static_cast<double>(dims) * std::numbers::ln2) + bits;
}

double anomaly_ratio(double bpd_outlier, double bpd_inlier) {
  if (!(bpd_inlier > 0.0)) throw std::domain_error("anomaly_ratio: inlier bpd must be positive");
  return bpd_outlier / bpd_inlier;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

void MetricsReport::check_consistency() const {
  if (dims <= 0) return;
  const double expected = bits_per_dim(nats, dims, bits);
  if (std::abs(expected - bpd) > 1e-9 * std::max(1.0, std::abs(bpd))) {
    throw std::logic_error("metrics report: bpd does not match nats");
  }
}

nlohmann::json MetricsReport::to_json() const {
  check_consistency();
  nlohmann::json j = {{"dataset", dataset}, {"nats", nats}, {"bpd", bpd},     {"bits", bits},
                      {"dims", dims},       {"exact", exact}, {"seed", seed}, {"files", files}};
  j["ks"] = ks ? nlohmann::json(*ks) : nlohmann::json(nullptr);
  j["ratio"] = ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr);
  return j;
}

Tensor score_rows(const models::DensityModel& model, const Tensor& x, const ScoreOptions& options) {
  diff::NoGradGuard guard;
  const std::size_t n = x.dim(0);
  Tensor out(diff::Shape{n});
  const auto* vae = dynamic_cast<const models::VAEBaseline*>(&model);
  diff::Rng rng(options.seed);
  for (std::size_t begin = 0; begin < n; begin += options.chunk) {
    const std::size_t end = std::min(n, begin + options.chunk);
    const Tensor rows = x.row_range(begin, end);
    const Tensor ll = vae ? vae->importance_log_likelihood(rows, options.importance_samples, rng)
                          : model.objective(diff::constant(rows), {}).value();
    std::copy(ll.values().begin(), ll.values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(begin));
  }
  return out;
}

double mean(const Tensor& values) {
  if (values.empty()) throw std::invalid_argument("mean: empty tensor");
  double s = 0.0;
  for (double v : values.values()) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace funnel::eval
