#pragma once

#include "funnel/bijections/bijection.hpp"

namespace funnel::bijections {

inline constexpr double kMinBinWidth = 1e-3;
inline constexpr double kMinBinHeight = 1e-3;
inline constexpr double kMinDerivative = 1e-3;

/// Unnormalized monotone rational-quadratic spline parameters, one row per
/// parameter set: widths [P, K], heights [P, K], interior derivatives [P, K-1].
/// For an input of shape [B, D], P == D shares a spline per feature across the
/// batch and P == B * D gives every element its own spline.
struct SplineParams {
  Var widths;
  Var heights;
  Var derivatives;
  double tail_bound = 3.0;

  std::size_t bins() const { return widths.dim(1); }
  std::size_t rows() const { return widths.dim(0); }
};

/// Knot coordinates on [-B, B] with boundary derivatives fixed to one, each
/// [P, K + 1]. Widths and heights come from a floored softmax scaled by 2B;
/// derivatives from a shifted softplus so zero raw parameters give the
/// identity map.
struct SplineKnots {
  Var x, y, derivative;
  double tail_bound;
};

SplineKnots make_knots(const SplineParams& params);

/// Applies the spline elementwise (identity outside [-B, B]). Returns the
/// transformed [B, D] tensor and the per-row sum of log-derivatives.
BijectionResult rq_spline(const Var& x, const SplineParams& params, bool inverse = false);

/// Raw parameters producing the identity map.
SplineParams identity_spline_params(std::size_t rows, std::size_t bins, double tail_bound);

/// Per-feature spline with free (unconditioned) parameters.
class ElementwiseSpline final : public Bijection {
 public:
  ElementwiseSpline(ParamStore& store, const std::string& prefix, std::size_t dim, std::size_t bins,
                    double tail_bound);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "elementwise_spline"; }
  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;
  SplineParams params() const { return {widths_, heights_, derivatives_, tail_bound_}; }

 private:
  std::size_t dim_;
  double tail_bound_;
  Var widths_, heights_, derivatives_;
};

}  // namespace funnel::bijections
