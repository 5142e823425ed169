#pragma once

#include "funnel/bijections/bijection.hpp"

namespace funnel::bijections {

struct ConditionerSpec {
  std::size_t hidden = 64;
  std::size_t blocks = 2;
  nn::Activation activation = nn::Activation::relu;
  double dropout = 0.0;
};

/// Features marked true in the mask are transformed; the rest pass through and,
/// together with the optional context, feed the conditioner. The identity part
/// may be empty when a context is present.
class Coupling : public Bijection {
 public:
  std::size_t dim() const override { return mask_.size(); }
  std::size_t context_dim() const override { return context_dim_; }
  const std::vector<bool>& mask() const noexcept { return mask_; }

  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;

 protected:
  Coupling(ParamStore& store, const std::string& prefix, std::vector<bool> mask, std::size_t context_dim,
           std::size_t params_per_feature, const ConditionerSpec& spec, Rng& init);

  /// Transforms the selected features given raw conditioner output
  /// [batch, transformed * params_per_feature].
  virtual BijectionResult transform(const Var& x, const Var& raw, bool inverse) const = 0;

  std::size_t transformed_count() const noexcept { return transformed_.size(); }

 private:
  Var conditioner_input(const Var& identity_part, const Var& context) const;

  std::vector<bool> mask_;
  std::size_t context_dim_;
  std::vector<std::size_t> identity_, transformed_, restore_;
  nn::ResidualNet conditioner_;
};

/// y = x * exp(s) + t on the transformed features; log|det| = sum(s).
class AffineCoupling final : public Coupling {
 public:
  AffineCoupling(ParamStore& store, const std::string& prefix, std::vector<bool> mask, std::size_t context_dim,
                 const ConditionerSpec& spec, Rng& init);
  std::string name() const override { return "affine_coupling"; }

 protected:
  BijectionResult transform(const Var& x, const Var& raw, bool inverse) const override;
};

/// Monotone rational-quadratic spline on the transformed features, with
/// parameters from the conditioner.
class SplineCoupling final : public Coupling {
 public:
  SplineCoupling(ParamStore& store, const std::string& prefix, std::vector<bool> mask, std::size_t context_dim,
                 std::size_t bins, double tail_bound, const ConditionerSpec& spec, Rng& init);
  std::string name() const override { return "spline_coupling"; }

 protected:
  BijectionResult transform(const Var& x, const Var& raw, bool inverse) const override;

 private:
  std::size_t bins_;
  double tail_bound_;
};

/// Alternating half masks: even `parity` transforms the upper half.
std::vector<bool> half_mask(std::size_t dim, bool parity);

}  // namespace funnel::bijections
