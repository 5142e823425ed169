#include "funnel/nn/networks.hpp"

#include <cmath>
#include <stdexcept>

namespace funnel::nn {

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

Var activate(const Var& x, Activation act) {
  return act == Activation::relu ? diff::relu(x) : diff::tanh(x);
}

Linear::Linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, Rng& init,
               bool zero_init)
    : in_(in), out_(out) {
  Tensor w(diff::Shape{in, out});
  Tensor b(diff::Shape{out});
  if (!zero_init) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(in, 1)));
    for (double& v : w.values()) v = bound * (2.0 * init.uniform() - 1.0);
    for (double& v : b.values()) v = bound * (2.0 * init.uniform() - 1.0);
  }
  weight_ = store.add(prefix + ".weight", std::move(w));
  bias_ = store.add(prefix + ".bias", std::move(b));
}

Var Linear::operator()(const Var& x) const {
  if (x.rank() != 2 || x.dim(1) != in_) {
    throw std::invalid_argument("Linear: expected [batch, " + std::to_string(in_) + "] input, got " +
                                diff::shape_string(x.shape()));
  }
  return diff::matmul(x, weight_) + bias_;
}

MLP::MLP(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, std::size_t hidden,
         std::size_t depth, Activation act, double dropout, Rng& init, bool zero_last)
    : act_(act), dropout_(dropout) {
  std::size_t width = in;
  for (std::size_t i = 0; i < depth; ++i) {
    layers_.emplace_back(store, prefix + ".l" + std::to_string(i), width, hidden, init);
    width = hidden;
  }
  layers_.emplace_back(store, prefix + ".l" + std::to_string(depth), width, out, init, zero_last);
}

Var MLP::operator()(const Var& x, const Pass& pass) const {
  Var h = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    h = diff::dropout(activate(layers_[i](h), act_), dropout_, pass.rng, pass.training);
  }
  return layers_.back()(h);
}

ResidualNet::ResidualNet(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                         std::size_t hidden, std::size_t blocks, Activation act, double dropout, Rng& init,
                         bool zero_last)
    : input_(store, prefix + ".in", in, hidden, init),
      output_(store, prefix + ".out", hidden, out, init, zero_last),
      act_(act),
      dropout_(dropout) {
  for (std::size_t i = 0; i < blocks; ++i) {
    const std::string p = prefix + ".block" + std::to_string(i);
    blocks_.emplace_back(Linear(store, p + ".0", hidden, hidden, init), Linear(store, p + ".1", hidden, hidden, init));
  }
}

Var ResidualNet::operator()(const Var& x, const Pass& pass) const {
  Var h = input_(x);
  for (const auto& [first, second] : blocks_) {
    Var t = first(activate(h, act_));
    t = diff::dropout(activate(t, act_), dropout_, pass.rng, pass.training);
    h = h + second(t);
  }
  return output_(activate(h, act_));
}

}  // namespace funnel::nn
