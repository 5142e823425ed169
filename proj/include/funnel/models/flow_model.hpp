#pragma once

#include <vector>

#include "funnel/densities/density.hpp"
#include "funnel/funnels/layer.hpp"

namespace funnel::models {

using diff::ParamStore;
using diff::Rng;
using diff::Tensor;
using diff::Var;
using funnels::LayerPtr;
using nn::Pass;

/// Decomposed log-likelihood: total = base_logprob + sum(contributions).
struct LikelihoodParts {
  Var base_logprob;               // [batch]
  std::vector<Var> contributions;  // one [batch] entry per layer, forward order
  bool bound_loose = false;

  Var total() const;
};

/// Common surface of trainable density models.
class DensityModel {
 public:
  virtual ~DensityModel() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t latent_dim() const = 0;
  virtual std::string name() const = 0;
  /// Per-row training objective: exact log-likelihood, or a lower bound.
  virtual Var objective(const Var& x, const Pass& pass) const = 0;
  /// Whether objective() is the exact log-likelihood.
  virtual bool exact() const = 0;
  /// Base draws at temperature T pushed to data space.
  virtual Tensor sample(std::size_t n, double temperature, std::uint64_t seed) const = 0;
  /// Deterministic latent code of each row.
  virtual Tensor encode(const Tensor& x) const = 0;
  /// Samples of the latent prior at temperature T.
  Tensor sample_latent(std::size_t n, double temperature, std::uint64_t seed) const;
};

/// Layers in data-to-latent order over a standard normal base.
class FlowModel final : public DensityModel {
 public:
  FlowModel(std::size_t input_dim, std::vector<LayerPtr> layers);

  std::size_t input_dim() const override { return input_dim_; }
  std::size_t latent_dim() const override { return base_.dim(); }
  std::string name() const override { return "flow"; }
  Var objective(const Var& x, const Pass& pass) const override { return log_prob(x, pass).total(); }
  bool exact() const override;
  Tensor sample(std::size_t n, double temperature, std::uint64_t seed) const override;
  Tensor encode(const Tensor& x) const override;

  LikelihoodParts log_prob(const Var& x, const Pass& pass = {}) const;
  /// Pushes latents through the inverse layers in reverse order.
  Tensor decode(const Tensor& z, Rng& rng) const;
  const std::vector<LayerPtr>& layers() const noexcept { return layers_; }

 private:
  std::size_t input_dim_;
  std::vector<LayerPtr> layers_;
  densities::StandardNormal base_;
};

/// Gaussian-encoder / Gaussian-decoder VAE with MLPs; depth 0 makes both maps
/// affine. sigma = softplus(s) + floor on both sides.
class VAEBaseline final : public DensityModel {
 public:
  VAEBaseline(ParamStore& store, const std::string& prefix, std::size_t input_dim, std::size_t latent_dim,
              std::size_t hidden, std::size_t depth, Rng& init, double dropout = 0.0);

  std::size_t input_dim() const override { return input_dim_; }
  std::size_t latent_dim() const override { return latent_dim_; }
  std::string name() const override { return "vae"; }
  Var objective(const Var& x, const Pass& pass) const override;
  bool exact() const override { return false; }
  Tensor sample(std::size_t n, double temperature, std::uint64_t seed) const override;
  Tensor encode(const Tensor& x) const override;

  densities::GaussianParams encoder(const Var& x, const Pass& pass = {}) const;
  densities::GaussianParams decoder(const Var& z, const Pass& pass = {}) const;
  /// Single-sample reparameterized ELBO per row; needs pass.rng.
  Var elbo(const Var& x, const Pass& pass) const;
  /// Importance-sampled log p(x) with the encoder as proposal, per row.
  Tensor importance_log_likelihood(const Tensor& x, std::size_t samples, Rng& rng) const;

  const nn::MLP& encoder_net() const noexcept { return encoder_; }
  const nn::MLP& decoder_net() const noexcept { return decoder_; }

 private:
  std::size_t input_dim_, latent_dim_;
  nn::MLP encoder_, decoder_;
};

}  // namespace funnel::models
