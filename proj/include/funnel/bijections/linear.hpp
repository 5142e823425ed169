#pragma once

#include "funnel/bijections/bijection.hpp"

namespace funnel::bijections {

/// y = P L U x with L unit lower-triangular, U upper-triangular with diagonal
/// sign * exp(d), and P a fixed permutation of the outputs (y_i = (LUx)_{P[i]}).
/// log|det| = sum(d).
class LULinear final : public Bijection {
 public:
  /// Identity initialization; `permutation` empty means P = I.
  LULinear(ParamStore& store, const std::string& prefix, std::size_t dim, std::vector<std::size_t> permutation = {},
           std::vector<double> diagonal_signs = {});

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "lu_linear"; }
  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;

  /// Differentiable L U (without P).
  Var matrix() const;
  /// log|det(LU)| as a rank-0 value.
  Var log_abs_det() const;
  /// Solves L U x = rhs row-wise for a [batch, dim] right-hand side.
  Tensor solve(const Tensor& rhs) const;

  const Var& lower() const noexcept { return lower_; }
  const Var& upper() const noexcept { return upper_; }
  const Var& log_diagonal() const noexcept { return log_diag_; }

 private:
  std::size_t dim_;
  std::vector<std::size_t> permutation_, inverse_permutation_;
  Tensor signs_, lower_mask_, upper_mask_;
  Var lower_, upper_, log_diag_;
};

/// Per-feature affine map y = (x - shift) * exp(log_scale), initialized on the
/// first batch it sees so that batch has zero mean and unit variance.
class ActNorm final : public Bijection {
 public:
  ActNorm(ParamStore& store, const std::string& prefix, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "actnorm"; }
  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;

  bool initialized() const { return initialized_.value()[0] != 0.0; }
  /// Data-dependent initialization; throws on a zero-variance feature.
  void initialize(const Tensor& batch) const;

 private:
  std::size_t dim_;
  Var shift_, log_scale_, initialized_;
};

/// Fixed permutation of features; volume preserving.
class FixedPermutation final : public Bijection {
 public:
  FixedPermutation(std::size_t dim, std::uint64_t seed);
  explicit FixedPermutation(std::vector<std::size_t> permutation);

  std::size_t dim() const override { return permutation_.size(); }
  std::string name() const override { return "permutation"; }
  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;
  const std::vector<std::size_t>& permutation() const noexcept { return permutation_; }

 private:
  std::vector<std::size_t> permutation_, inverse_;
};

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& permutation);

}  // namespace funnel::bijections
