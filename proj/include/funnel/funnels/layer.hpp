#pragma once

#include <memory>
#include <string>

#include "funnel/bijections/bijection.hpp"

namespace funnel::funnels {

using diff::Rng;
using diff::Tensor;
using diff::Var;
using nn::Pass;

struct LayerOutput {
  Var output;
  Var contribution;  // [batch] log-likelihood contribution
  bool bound_loose = false;
};

/// One step of a flow model in the data-to-latent direction. Bijections and
/// funnels share this interface; funnels have output_dim() < input_dim().
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual std::string name() const = 0;

  virtual LayerOutput forward(const Var& x, const Pass& pass) const = 0;
  /// Generative direction; stochastic layers draw from `rng`.
  virtual Tensor inverse(const Tensor& z, Rng& rng) const = 0;
  /// False for layers whose contribution is only a lower bound.
  virtual bool exact() const { return true; }

 protected:
  void check_input(const Var& x) const;
  void check_latent(const Tensor& z) const;
};

using LayerPtr = std::unique_ptr<Layer>;

/// Wraps an unconditioned bijection as a layer with contribution log|det J|.
class BijectionLayer final : public Layer {
 public:
  explicit BijectionLayer(bijections::BijectionPtr bijection);

  std::size_t input_dim() const override { return bijection_->dim(); }
  std::size_t output_dim() const override { return bijection_->dim(); }
  std::string name() const override { return bijection_->name(); }
  LayerOutput forward(const Var& x, const Pass& pass) const override;
  Tensor inverse(const Tensor& z, Rng& rng) const override;
  const bijections::Bijection& bijection() const { return *bijection_; }

 private:
  bijections::BijectionPtr bijection_;
};

}  // namespace funnel::funnels
