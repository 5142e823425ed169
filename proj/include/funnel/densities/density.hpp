#pragma once

#include <functional>
#include <memory>

#include "funnel/bijections/bijection.hpp"

namespace funnel::densities {

using bijections::BijectionPtr;
using diff::ParamStore;
using diff::Rng;
using diff::Tensor;
using diff::Var;
using nn::Pass;

inline constexpr double kSigmaFloor = 1e-3;

/// Density over `dim` features, optionally conditioned on `context_dim`
/// features. Unconditioned densities ignore the context argument.
class ConditionalDensity {
 public:
  virtual ~ConditionalDensity() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t context_dim() const { return 0; }
  virtual std::string name() const = 0;

  /// Per-row log density, shape [batch].
  virtual Var log_prob(const Var& x, const Var& context, const Pass& pass) const = 0;
  Var log_prob(const Var& x) const { return log_prob(x, Var{}, Pass{}); }

  /// `n` draws at temperature T (base noise scaled by T). With a context, n
  /// must equal its row count. Throws std::domain_error for T <= 0.
  virtual Tensor sample(std::size_t n, const Var& context, Rng& rng, double temperature = 1.0) const = 0;

 protected:
  void check(const Var& x, const Var& context) const;
  std::size_t sample_rows(std::size_t n, const Var& context, double temperature) const;
};

using DensityPtr = std::unique_ptr<ConditionalDensity>;

class StandardNormal final : public ConditionalDensity {
 public:
  explicit StandardNormal(std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "standard_normal"; }
  Var log_prob(const Var& x, const Var& context, const Pass& pass) const override;
  using ConditionalDensity::log_prob;
  Tensor sample(std::size_t n, const Var& context, Rng& rng, double temperature = 1.0) const override;

 private:
  std::size_t dim_;
};

struct GaussianParams {
  Var mean;   // [batch, dim]
  Var scale;  // [batch, dim], positive
};

/// Sum over the last axis of log N(x; mean, scale).
Var gaussian_log_prob(const Var& x, const Var& mean, const Var& scale);

/// Diagonal Gaussian whose mean and scale are functions of the context.
class GaussianConditional : public ConditionalDensity {
 public:
  Var log_prob(const Var& x, const Var& context, const Pass& pass) const override;
  using ConditionalDensity::log_prob;
  Tensor sample(std::size_t n, const Var& context, Rng& rng, double temperature = 1.0) const override;

  /// Mean and scale for `batch` rows.
  virtual GaussianParams params(const Var& context, std::size_t batch, const Pass& pass) const = 0;
  /// Reparameterized draw mean + scale * eps; differentiable in the parameters.
  Var rsample(const Var& context, std::size_t batch, Rng& rng, const Pass& pass) const;
};

/// The inverse-density ansatz: a network maps the context to (mu, s) and
/// sigma = softplus(s) + kSigmaFloor. Without a context mu and s are free
/// parameters. Starts at mu = 0, sigma = 1.
class DiagGaussianAnsatz final : public GaussianConditional {
 public:
  DiagGaussianAnsatz(ParamStore& store, const std::string& prefix, std::size_t dim, std::size_t context_dim,
                     std::size_t hidden, std::size_t depth, Rng& init, double dropout = 0.0,
                     nn::Activation act = nn::Activation::relu);

  std::size_t dim() const override { return dim_; }
  std::size_t context_dim() const override { return context_dim_; }
  std::string name() const override { return "diag_gaussian"; }
  GaussianParams params(const Var& context, std::size_t batch, const Pass& pass) const override;

 private:
  std::size_t dim_, context_dim_;
  nn::MLP net_;
  Var mean_, raw_scale_;
};

/// Gaussian with caller-supplied mean/scale functions; used for fixed
/// reconstructions and closed-form checks.
class FixedGaussian final : public GaussianConditional {
 public:
  using Fn = std::function<GaussianParams(const Var& context, std::size_t batch)>;
  FixedGaussian(std::size_t dim, std::size_t context_dim, Fn fn)
      : dim_(dim), context_dim_(context_dim), fn_(std::move(fn)) {}
  /// Constant mean and scale for every row.
  static std::unique_ptr<FixedGaussian> constant(std::size_t dim, double mean, double scale, std::size_t context_dim = 0);

  std::size_t dim() const override { return dim_; }
  std::size_t context_dim() const override { return context_dim_; }
  std::string name() const override { return "fixed_gaussian"; }
  GaussianParams params(const Var& context, std::size_t batch, const Pass&) const override {
    return fn_(context, batch);
  }

 private:
  std::size_t dim_, context_dim_;
  Fn fn_;
};

/// Context-conditioned bijections over a standard normal base.
class ConditionalFlowDensity final : public ConditionalDensity {
 public:
  ConditionalFlowDensity(std::size_t dim, std::size_t context_dim, std::vector<BijectionPtr> steps);

  std::size_t dim() const override { return dim_; }
  std::size_t context_dim() const override { return context_dim_; }
  std::string name() const override { return "conditional_flow"; }
  Var log_prob(const Var& x, const Var& context, const Pass& pass) const override;
  using ConditionalDensity::log_prob;
  Tensor sample(std::size_t n, const Var& context, Rng& rng, double temperature = 1.0) const override;

 private:
  std::size_t dim_, context_dim_;
  bijections::Chain chain_;
  StandardNormal base_;
};

/// Sum_i 0.5 (mu^2 + sigma^2 - 1 - 2 ln sigma). Throws std::domain_error on
/// a non-positive sigma.
double gaussian_kl(const Tensor& mean, const Tensor& scale);
/// Row-wise KL to the standard normal, shape [batch].
Var gaussian_kl(const Var& mean, const Var& scale);

}  // namespace funnel::densities
