#include "funnel/densities/density.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace funnel::densities {

using diff::Shape;

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
// softplus(kScaleShift) + kSigmaFloor == 1.
const double kScaleShift = std::log(std::expm1(1.0 - kSigmaFloor));
}  // namespace

void ConditionalDensity::check(const Var& x, const Var& context) const {
  if (x.rank() != 2 || x.dim(1) != dim()) {
    throw std::invalid_argument(name() + ": expected [batch, " + std::to_string(dim()) + "] input, got " +
                                diff::shape_string(x.shape()));
  }
  if (context_dim() == 0) return;
  if (!context || context.rank() != 2 || context.dim(1) != context_dim() || context.dim(0) != x.dim(0)) {
    throw std::invalid_argument(name() + ": expected [" + std::to_string(x.dim(0)) + ", " +
                                std::to_string(context_dim()) + "] context");
  }
}

std::size_t ConditionalDensity::sample_rows(std::size_t n, const Var& context, double temperature) const {
  if (!(temperature > 0.0)) throw std::domain_error(name() + ": temperature must be positive");
  if (context_dim() == 0) return n;
  if (!context || context.rank() != 2 || context.dim(1) != context_dim()) {
    throw std::invalid_argument(name() + ": sampling needs a [n, " + std::to_string(context_dim()) + "] context");
  }
  if (n != 0 && n != context.dim(0)) throw std::invalid_argument(name() + ": sample count differs from context rows");
  return context.dim(0);
}

StandardNormal::StandardNormal(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("standard_normal: dimension must be positive");
}

Var StandardNormal::log_prob(const Var& x, const Var& context, const Pass&) const {
  check(x, context);
  return diff::sum_last(diff::square(x)) * -0.5 - kHalfLog2Pi * static_cast<double>(dim_);
}

Tensor StandardNormal::sample(std::size_t n, const Var& context, Rng& rng, double temperature) const {
  const std::size_t rows = sample_rows(n, context, temperature);
  Tensor out(Shape{rows, dim_});
  for (double& v : out.values()) v = temperature * rng.normal();
  return out;
}

Var gaussian_log_prob(const Var& x, const Var& mean, const Var& scale) {
  Var u = (x - mean) / scale;
  return diff::sum_last(diff::square(u) * -0.5 - diff::log(scale) - kHalfLog2Pi);
}

Var GaussianConditional::log_prob(const Var& x, const Var& context, const Pass& pass) const {
  check(x, context);
  GaussianParams p = params(context, x.dim(0), pass);
  return gaussian_log_prob(x, p.mean, p.scale);
}

Tensor GaussianConditional::sample(std::size_t n, const Var& context, Rng& rng, double temperature) const {
  const std::size_t rows = sample_rows(n, context, temperature);
  diff::NoGradGuard guard;
  GaussianParams p = params(context, rows, Pass{});
  Tensor out(Shape{rows, dim()});
  const std::size_t mean_rows = p.mean.dim(0), scale_rows = p.scale.dim(0), d = dim();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double mu = p.mean.value().at(mean_rows == 1 ? 0 : i, j);
      const double sigma = p.scale.value().at(scale_rows == 1 ? 0 : i, j);
      out.at(i, j) = mu + temperature * sigma * rng.normal();
    }
  }
  return out;
}

Var GaussianConditional::rsample(const Var& context, std::size_t batch, Rng& rng, const Pass& pass) const {
  GaussianParams p = params(context, batch, pass);
  Tensor eps(Shape{batch, dim()});
  for (double& v : eps.values()) v = rng.normal();
  return p.mean + p.scale * diff::constant(std::move(eps));
}

DiagGaussianAnsatz::DiagGaussianAnsatz(ParamStore& store, const std::string& prefix, std::size_t dim,
                                       std::size_t context_dim, std::size_t hidden, std::size_t depth, Rng& init,
                                       double dropout, nn::Activation act)
    : dim_(dim), context_dim_(context_dim) {
  if (dim == 0) throw std::invalid_argument("diag_gaussian: dimension must be positive");
  if (context_dim == 0) {
    mean_ = store.add(prefix + ".mean", Tensor(Shape{1, dim}));
    raw_scale_ = store.add(prefix + ".raw_scale", Tensor(Shape{1, dim}));
  } else {
    net_ = nn::MLP(store, prefix + ".net", context_dim, 2 * dim, hidden, depth, act, dropout, init, true);
  }
}

GaussianParams DiagGaussianAnsatz::params(const Var& context, std::size_t batch, const Pass& pass) const {
  Var mean, raw;
  if (context_dim_ == 0) {
    Var zeros = diff::constant(Tensor(Shape{batch, dim_}));
    mean = zeros + mean_;
    raw = zeros + raw_scale_;
  } else {
    Var out = net_(context, pass);
    mean = diff::slice_cols(out, 0, dim_);
    raw = diff::slice_cols(out, dim_, 2 * dim_);
  }
  return {mean, diff::softplus(raw + kScaleShift) + kSigmaFloor};
}

std::unique_ptr<FixedGaussian> FixedGaussian::constant(std::size_t dim, double mean, double scale,
                                                       std::size_t context_dim) {
  if (!(scale > 0.0)) throw std::domain_error("fixed_gaussian: scale must be positive");
  return std::make_unique<FixedGaussian>(dim, context_dim, [dim, mean, scale](const Var&, std::size_t batch) {
    return GaussianParams{diff::constant(Tensor(Shape{batch, dim}, mean)),
                          diff::constant(Tensor(Shape{batch, dim}, scale))};
  });
}

ConditionalFlowDensity::ConditionalFlowDensity(std::size_t dim, std::size_t context_dim,
                                               std::vector<BijectionPtr> steps)
    : dim_(dim), context_dim_(context_dim), chain_(dim, context_dim, std::move(steps)), base_(dim) {}

Var ConditionalFlowDensity::log_prob(const Var& x, const Var& context, const Pass& pass) const {
  check(x, context);
  bijections::BijectionResult r = chain_.forward(x, context_dim_ ? context : Var{}, pass);
  return base_.log_prob(r.output) + r.log_abs_det;
}

Tensor ConditionalFlowDensity::sample(std::size_t n, const Var& context, Rng& rng, double temperature) const {
  const std::size_t rows = sample_rows(n, context, temperature);
  diff::NoGradGuard guard;
  Var z = diff::constant(base_.sample(rows, Var{}, rng, temperature));
  return chain_.inverse(z, context_dim_ ? context : Var{}, Pass{}).output.value();
}

double gaussian_kl(const Tensor& mean, const Tensor& scale) {
  if (mean.shape() != scale.shape()) throw std::invalid_argument("gaussian_kl: mean and scale shapes differ");
  double kl = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double s = scale[i];
    if (!(s > 0.0)) throw std::domain_error("gaussian_kl: scale must be positive");
    kl += 0.5 * (mean[i] * mean[i] + s * s - 1.0 - 2.0 * std::log(s));
  }
  return kl;
}

Var gaussian_kl(const Var& mean, const Var& scale) {
  return diff::sum_last(diff::square(mean) + diff::square(scale) - 1.0 - 2.0 * diff::log(scale)) * 0.5;
}

}  // namespace funnel::densities
