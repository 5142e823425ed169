#pragma once

#include "funnel/bijections/linear.hpp"
#include "funnel/bijections/spline.hpp"
#include "funnel/funnels/funnel.hpp"

namespace funnel::funnels {

using diff::ParamStore;

struct SplineActivation {
  std::size_t bins = 10;
  double tail_bound = 2.0;
};

enum class FMLPMode { exact, lower_bound };

/// Dimension-reducing MLP layer n -> d. With x_minus the first n - d features
/// and x_plus the last d:
///   h = R x_plus + W' x_minus + b,   z = spline(h)
/// R is an LU-parameterized invertible matrix (identity at init), W' starts at
/// zero. Exact mode scores p_phi(x_minus | h); lower-bound mode scores the
/// whole input p_phi(x | h) and flags the bound as loose.
class FMLPLayer final : public Layer {
 public:
  FMLPLayer(ParamStore& store, const std::string& prefix, std::size_t n, std::size_t d, FMLPMode mode,
            SplineActivation activation, Rng& init, std::size_t hidden = 64, std::size_t depth = 2);
  FMLPLayer(ParamStore& store, const std::string& prefix, std::size_t n, std::size_t d, FMLPMode mode,
            SplineActivation activation, DensityPtr inverse_density);

  std::size_t input_dim() const override { return n_; }
  std::size_t output_dim() const override { return d_; }
  std::string name() const override { return "fmlp"; }
  LayerOutput forward(const Var& x, const Pass& pass) const override;
  Tensor inverse(const Tensor& z, Rng& rng) const override;
  bool exact() const override { return mode_ == FMLPMode::exact; }

  /// Pre-activation h = W x + b with W = [W' | R].
  Var pre_activation(const Var& x) const;
  /// The composed [d, n] weight matrix W acting on x.
  Tensor weight_matrix() const;
  const bijections::LULinear& r() const noexcept { return r_; }
  const Var& w_minus() const noexcept { return w_minus_; }
  const Var& bias() const noexcept { return bias_; }
  const bijections::ElementwiseSpline& activation() const noexcept { return activation_; }
  FMLPMode mode() const noexcept { return mode_; }

 private:
  std::size_t n_, d_;
  FMLPMode mode_;
  bijections::LULinear r_;
  Var w_minus_, bias_;
  bijections::ElementwiseSpline activation_;
  DensityPtr density_;
};

/// Square F-MLP: z = spline(R x + b); an ordinary bijection.
class FMLPBijection final : public bijections::Bijection {
 public:
  FMLPBijection(ParamStore& store, const std::string& prefix, std::size_t dim, SplineActivation activation);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "fmlp_bijection"; }
  bijections::BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  bijections::BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using bijections::Bijection::forward;
  using bijections::Bijection::inverse;
  const bijections::LULinear& r() const noexcept { return r_; }
  const Var& bias() const noexcept { return bias_; }
  const bijections::ElementwiseSpline& activation() const noexcept { return activation_; }

 private:
  std::size_t dim_;
  bijections::LULinear r_;
  Var bias_;
  bijections::ElementwiseSpline activation_;
};

}  // namespace funnel::funnels
