#pragma once

#include <memory>
#include <string>
#include <vector>

#include "funnel/nn/networks.hpp"

namespace funnel::bijections {

using diff::ParamStore;
using diff::Rng;
using diff::Tensor;
using diff::Var;
using nn::Pass;

struct BijectionResult {
  Var output;
  Var log_abs_det;  // shape [batch]
};

/// Invertible map on `dim` features, optionally conditioned on a context of
/// `context_dim` features. forward() is the data-to-latent direction and is
/// differentiable; inverse() is used for sampling and records no gradients.
class Bijection {
 public:
  virtual ~Bijection() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t context_dim() const { return 0; }
  virtual std::string name() const = 0;

  virtual BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const = 0;
  virtual BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const = 0;

  BijectionResult forward(const Var& x) const { return forward(x, Var{}, Pass{}); }
  BijectionResult inverse(const Var& y) const { return inverse(y, Var{}, Pass{}); }

 protected:
  /// Validates input and context shapes; throws std::invalid_argument.
  void check_input(const Var& x, const Var& context) const;
};

using BijectionPtr = std::unique_ptr<Bijection>;

/// Sequential composition; log-determinants add.
class Chain final : public Bijection {
 public:
  Chain(std::size_t dim, std::size_t context_dim, std::vector<BijectionPtr> steps);

  std::size_t dim() const override { return dim_; }
  std::size_t context_dim() const override { return context_dim_; }
  std::string name() const override { return "chain"; }
  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;
  const std::vector<BijectionPtr>& steps() const noexcept { return steps_; }

 private:
  std::size_t dim_, context_dim_;
  std::vector<BijectionPtr> steps_;
};

/// Identity map with zero log-determinant.
class Identity final : public Bijection {
 public:
  Identity(std::size_t dim, std::size_t context_dim = 0) : dim_(dim), context_dim_(context_dim) {}
  std::size_t dim() const override { return dim_; }
  std::size_t context_dim() const override { return context_dim_; }
  std::string name() const override { return "identity"; }
  BijectionResult forward(const Var& x, const Var& context, const Pass& pass) const override;
  BijectionResult inverse(const Var& y, const Var& context, const Pass& pass) const override;
  using Bijection::forward;
  using Bijection::inverse;

 private:
  std::size_t dim_, context_dim_;
};

/// Zero vector of the batch size of `x`.
Var zeros_for_batch(const Var& x);
/// Broadcasts a rank-0 value to a [batch] vector, keeping its gradient.
Var broadcast_to_batch(const Var& scalar, std::size_t batch);

}  // namespace funnel::bijections
