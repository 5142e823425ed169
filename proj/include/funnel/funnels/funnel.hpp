#pragma once

#include <vector>

#include "funnel/densities/density.hpp"
#include "funnel/funnels/layer.hpp"

namespace funnel::funnels {

using densities::ConditionalDensity;
using densities::DensityPtr;

/// Splits n features into x_minus (reconstructed by p_phi) and x_plus
/// (mapped bijectively to the latent).
struct PartitionSpec {
  std::size_t n = 0;
  std::vector<std::size_t> minus;
  std::vector<std::size_t> plus;

  /// x_minus = the first `minus_count` features, x_plus = the rest.
  static PartitionSpec leading(std::size_t n, std::size_t minus_count);
  /// Throws std::invalid_argument unless the index sets are disjoint, cover
  /// 0..n-1, and x_plus is non-empty.
  void validate() const;
  /// Inverse of the [minus..., plus...] column ordering.
  std::vector<std::size_t> restore_order() const;
};

/// Generic funnel: z = F(x_plus | x_minus) in the data-to-latent direction,
/// contribution log p_phi(x_minus | z) + log|det dF/dx_plus|. F may be
/// unconditioned (context_dim 0) or conditioned on x_minus.
class FunnelLayer final : public Layer {
 public:
  FunnelLayer(PartitionSpec partition, bijections::BijectionPtr transform, DensityPtr inverse_density);

  std::size_t input_dim() const override { return partition_.n; }
  std::size_t output_dim() const override { return partition_.plus.size(); }
  std::string name() const override { return "funnel"; }
  LayerOutput forward(const Var& x, const Pass& pass) const override;
  Tensor inverse(const Tensor& z, Rng& rng) const override;

  const PartitionSpec& partition() const noexcept { return partition_; }

 private:
  PartitionSpec partition_;
  std::vector<std::size_t> restore_;
  bijections::BijectionPtr transform_;
  DensityPtr density_;
};

/// Slice surjection: z = x_plus, V = log p_phi(x_minus | x_plus). With an
/// empty x_minus `density` may be null and V = 0.
LayerOutput slice_contribution(const Var& x, const PartitionSpec& partition, const ConditionalDensity* density,
                               const Pass& pass = {});

/// Dimension-increasing funnel: z_aug ~ q(. | x), z_main = G(x | z_aug) in the
/// data-to-latent direction, output [z_main, z_aug]. The contribution is the
/// single-sample estimate log|det dG/dx| - log q(z_aug | x); forward needs
/// pass.rng.
class GenerativeFunnel final : public Layer {
 public:
  GenerativeFunnel(std::size_t dim, std::unique_ptr<densities::GaussianConditional> augment,
                   bijections::BijectionPtr transform);

  std::size_t input_dim() const override { return dim_; }
  std::size_t output_dim() const override { return dim_ + augment_dim_; }
  std::string name() const override { return "generative_funnel"; }
  LayerOutput forward(const Var& x, const Pass& pass) const override;
  Tensor inverse(const Tensor& z, Rng& rng) const override;
  bool exact() const override { return augment_dim_ == 0; }

 private:
  std::size_t dim_, augment_dim_;
  std::unique_ptr<densities::GaussianConditional> augment_;
  bijections::BijectionPtr transform_;
};

/// Writes columns of `minus` and `plus` back into an [rows, n] tensor.
Tensor assemble(const Tensor& minus, const Tensor& plus, const PartitionSpec& partition);

}  // namespace funnel::funnels
