#include "funnel/funnels/fmlp.hpp"

#include <stdexcept>

namespace funnel::funnels {

using diff::Shape;

namespace {
std::size_t checked_latent(std::size_t n, std::size_t d) {
  if (d == 0 || d >= n) throw std::invalid_argument("fmlp: latent dimension must satisfy 0 < d < n");
  return d;
}
}  // namespace

FMLPLayer::FMLPLayer(ParamStore& store, const std::string& prefix, std::size_t n, std::size_t d, FMLPMode mode,
                     SplineActivation activation, Rng& init, std::size_t hidden, std::size_t depth)
    : FMLPLayer(store, prefix, n, d, mode, activation, nullptr) {
  density_ = std::make_unique<densities::DiagGaussianAnsatz>(store, prefix + ".ansatz",
                                                             mode == FMLPMode::exact ? n - d : n, d, hidden, depth, init);
}

FMLPLayer::FMLPLayer(ParamStore& store, const std::string& prefix, std::size_t n, std::size_t d, FMLPMode mode,
                     SplineActivation activation, DensityPtr inverse_density)
    : n_(n),
      d_(checked_latent(n, d)),
      mode_(mode),
      r_(store, prefix + ".r", d),
      w_minus_(store.add(prefix + ".w_minus", Tensor(Shape{n - d, d}))),
      bias_(store.add(prefix + ".bias", Tensor(Shape{d}))),
      activation_(store, prefix + ".activation", d, activation.bins, activation.tail_bound),
      density_(std::move(inverse_density)) {
  if (density_) {
    const std::size_t expected = mode == FMLPMode::exact ? n - d : n;
    if (density_->dim() != expected || density_->context_dim() != d) {
      throw std::invalid_argument("fmlp: inverse density has the wrong dimensions");
    }
  }
}

Var FMLPLayer::pre_activation(const Var& x) const {
  Var minus = diff::slice_cols(x, 0, n_ - d_);
  Var plus = diff::slice_cols(x, n_ - d_, n_);
  return r_.forward(plus).output + diff::matmul(minus, w_minus_) + bias_;
}

Tensor FMLPLayer::weight_matrix() const {
  diff::NoGradGuard guard;
  const Tensor r = r_.matrix().value();
  const Tensor& wm = w_minus_.value();
  Tensor w(Shape{d_, n_});
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t j = 0; j < n_ - d_; ++j) w.at(i, j) = wm.at(j, i);
    for (std::size_t j = 0; j < d_; ++j) w.at(i, n_ - d_ + j) = r.at(i, j);
  }
  return w;
}

LayerOutput FMLPLayer::forward(const Var& x, const Pass& pass) const {
  check_input(x);
  Var h = pre_activation(x);
  bijections::BijectionResult act = activation_.forward(h, Var{}, pass);
  Var target = mode_ == FMLPMode::exact ? diff::slice_cols(x, 0, n_ - d_) : x;
  Var v = density_->log_prob(target, h, pass) + bijections::broadcast_to_batch(r_.log_abs_det(), x.dim(0)) +
          act.log_abs_det;
  return {act.output, v, mode_ == FMLPMode::lower_bound};
}

Tensor FMLPLayer::inverse(const Tensor& z, Rng& rng) const {
  check_latent(z);
  diff::NoGradGuard guard;
  const std::size_t batch = z.dim(0);
  Var h = activation_.inverse(diff::constant(z), Var{}, Pass{}).output;
  const Tensor drawn = density_->sample(batch, h, rng);
  if (mode_ == FMLPMode::lower_bound) return drawn;
  Var minus = diff::constant(drawn);
  Var rhs = h - diff::matmul(minus, w_minus_) - bias_;
  Tensor plus = r_.inverse(rhs).output.value();
  Tensor x(Shape{batch, n_});
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < n_ - d_; ++j) x.at(i, j) = drawn.at(i, j);
    for (std::size_t j = 0; j < d_; ++j) x.at(i, n_ - d_ + j) = plus.at(i, j);
  }
  return x;
}

FMLPBijection::FMLPBijection(ParamStore& store, const std::string& prefix, std::size_t dim,
                             SplineActivation activation)
    : dim_(dim),
      r_(store, prefix + ".r", dim),
      bias_(store.add(prefix + ".bias", Tensor(Shape{dim}))),
      activation_(store, prefix + ".activation", dim, activation.bins, activation.tail_bound) {}

bijections::BijectionResult FMLPBijection::forward(const Var& x, const Var& context, const Pass& pass) const {
  check_input(x, context);
  bijections::BijectionResult lin = r_.forward(x, Var{}, pass);
  bijections::BijectionResult act = activation_.forward(lin.output + bias_, Var{}, pass);
  return {act.output, lin.log_abs_det + act.log_abs_det};
}

bijections::BijectionResult FMLPBijection::inverse(const Var& y, const Var& context, const Pass& pass) const {
  check_input(y, context);
  diff::NoGradGuard guard;
  bijections::BijectionResult act = activation_.inverse(y, Var{}, pass);
  bijections::BijectionResult lin = r_.inverse(act.output - bias_, Var{}, pass);
  return {lin.output, act.log_abs_det + lin.log_abs_det};
}

}  // namespace funnel::funnels
