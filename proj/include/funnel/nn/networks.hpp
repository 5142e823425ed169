#pragma once

#include <string>
#include <vector>

#include "funnel/diff/ops.hpp"
#include "funnel/diff/param_store.hpp"
#include "funnel/diff/rng.hpp"

namespace funnel::nn {

using diff::ParamStore;
using diff::Rng;
using diff::Tensor;
using diff::Var;

/// Evaluation mode for one forward pass. `rng` feeds dropout and any
/// stochastic layer; it may be null in deterministic evaluation.
struct Pass {
  bool training = false;
  Rng* rng = nullptr;
};

enum class Activation { relu, tanh };

Activation parse_activation(const std::string& name);
Var activate(const Var& x, Activation act);

/// Affine map y = x W + b over batch rows.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, Rng& init,
         bool zero_init = false);

  Var operator()(const Var& x) const;
  std::size_t in_features() const noexcept { return in_; }
  std::size_t out_features() const noexcept { return out_; }
  const Var& weight() const noexcept { return weight_; }
  const Var& bias() const noexcept { return bias_; }

 private:
  std::size_t in_ = 0, out_ = 0;
  Var weight_, bias_;
};

/// Plain feed-forward network; depth counts hidden layers (0 = single affine map).
class MLP {
 public:
  MLP() = default;
  MLP(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, std::size_t hidden,
      std::size_t depth, Activation act, double dropout, Rng& init, bool zero_last = false);

  Var operator()(const Var& x, const Pass& pass) const;
  std::size_t in_features() const noexcept { return layers_.front().in_features(); }
  std::size_t out_features() const noexcept { return layers_.back().out_features(); }
  const std::vector<Linear>& layers() const noexcept { return layers_; }

 private:
  std::vector<Linear> layers_;
  Activation act_ = Activation::relu;
  double dropout_ = 0.0;
};

/// Residual conditioner: input map, `blocks` pre-activation residual blocks of
/// two linear layers each, output map. The output map may be zero-initialized
/// so couplings start as the identity.
class ResidualNet {
 public:
  ResidualNet() = default;
  ResidualNet(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, std::size_t hidden,
              std::size_t blocks, Activation act, double dropout, Rng& init, bool zero_last = true);

  Var operator()(const Var& x, const Pass& pass) const;
  std::size_t in_features() const noexcept { return input_.in_features(); }
  std::size_t out_features() const noexcept { return output_.out_features(); }

 private:
  Linear input_, output_;
  std::vector<std::pair<Linear, Linear>> blocks_;
  Activation act_ = Activation::relu;
  double dropout_ = 0.0;
};

}  // namespace funnel::nn
