#include "funnel/funnels/funnel.hpp"

#include <stdexcept>

namespace funnel::funnels {

using diff::Shape;

void Layer::check_input(const Var& x) const {
  if (x.rank() != 2 || x.dim(1) != input_dim()) {
    throw std::invalid_argument(name() + ": expected [batch, " + std::to_string(input_dim()) + "] input, got " +
                                diff::shape_string(x.shape()));
  }
}

void Layer::check_latent(const Tensor& z) const {
  if (z.rank() != 2 || z.dim(1) != output_dim()) {
    throw std::invalid_argument(name() + ": expected [batch, " + std::to_string(output_dim()) + "] latent, got " +
                                diff::shape_string(z.shape()));
  }
}

BijectionLayer::BijectionLayer(bijections::BijectionPtr bijection) : bijection_(std::move(bijection)) {
  if (bijection_->context_dim() != 0) throw std::invalid_argument("bijection layer: conditioned bijections need a funnel");
}

LayerOutput BijectionLayer::forward(const Var& x, const Pass& pass) const {
  bijections::BijectionResult r = bijection_->forward(x, Var{}, pass);
  return {r.output, r.log_abs_det, false};
}

Tensor BijectionLayer::inverse(const Tensor& z, Rng&) const {
  check_latent(z);
  diff::NoGradGuard guard;
  return bijection_->inverse(diff::constant(z), Var{}, Pass{}).output.value();
}

PartitionSpec PartitionSpec::leading(std::size_t n, std::size_t minus_count) {
  PartitionSpec p;
  p.n = n;
  for (std::size_t i = 0; i < n; ++i) (i < minus_count ? p.minus : p.plus).push_back(i);
  p.validate();
  return p;
}

void PartitionSpec::validate() const {
  if (plus.empty()) throw std::invalid_argument("partition: x_plus must be non-empty");
  if (minus.size() + plus.size() != n) throw std::invalid_argument("partition: index sets must cover all features");
  std::vector<bool> seen(n, false);
  for (const auto* set : {&minus, &plus}) {
    for (std::size_t i : *set) {
      if (i >= n || seen[i]) throw std::invalid_argument("partition: index sets must be disjoint and in range");
      seen[i] = true;
    }
  }
}

std::vector<std::size_t> PartitionSpec::restore_order() const {
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < minus.size(); ++k) order[minus[k]] = k;
  for (std::size_t k = 0; k < plus.size(); ++k) order[plus[k]] = minus.size() + k;
  return order;
}

Tensor assemble(const Tensor& minus, const Tensor& plus, const PartitionSpec& partition) {
  const std::size_t rows = plus.dim(0);
  Tensor x(Shape{rows, partition.n});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < partition.minus.size(); ++k) x.at(i, partition.minus[k]) = minus.at(i, k);
    for (std::size_t k = 0; k < partition.plus.size(); ++k) x.at(i, partition.plus[k]) = plus.at(i, k);
  }
  return x;
}

FunnelLayer::FunnelLayer(PartitionSpec partition, bijections::BijectionPtr transform, DensityPtr inverse_density)
    : partition_(std::move(partition)), transform_(std::move(transform)), density_(std::move(inverse_density)) {
  partition_.validate();
  restore_ = partition_.restore_order();
  const std::size_t m = partition_.minus.size(), d = partition_.plus.size();
  if (transform_->dim() != d) throw std::invalid_argument("funnel: transform dimension must equal |x_plus|");
  if (transform_->context_dim() != 0 && transform_->context_dim() != m) {
    throw std::invalid_argument("funnel: transform context must be x_minus");
  }
  if (m > 0 && (!density_ || density_->dim() != m || density_->context_dim() != d)) {
    throw std::invalid_argument("funnel: inverse density must model |x_minus| features given the latent");
  }
}

LayerOutput FunnelLayer::forward(const Var& x, const Pass& pass) const {
  check_input(x);
  Var minus = diff::select_cols(x, partition_.minus);
  Var plus = diff::select_cols(x, partition_.plus);
  bijections::BijectionResult r = transform_->forward(plus, transform_->context_dim() ? minus : Var{}, pass);
  if (!r.log_abs_det.value().all_finite()) throw std::domain_error("funnel: non-finite log-determinant in F");
  if (partition_.minus.empty()) return {r.output, r.log_abs_det, false};
  return {r.output, density_->log_prob(minus, r.output, pass) + r.log_abs_det, false};
}

Tensor FunnelLayer::inverse(const Tensor& z, Rng& rng) const {
  check_latent(z);
  diff::NoGradGuard guard;
  Var zv = diff::constant(z);
  Var minus = diff::constant(partition_.minus.empty() ? Tensor(Shape{z.dim(0), 0})
                                                      : density_->sample(z.dim(0), zv, rng));
  Var plus = transform_->inverse(zv, transform_->context_dim() ? minus : Var{}, Pass{}).output;
  return assemble(minus.value(), plus.value(), partition_);
}

LayerOutput slice_contribution(const Var& x, const PartitionSpec& partition, const ConditionalDensity* density,
                               const Pass& pass) {
  partition.validate();
  Var plus = diff::select_cols(x, partition.plus);
  if (partition.minus.empty()) return {plus, bijections::zeros_for_batch(x), false};
  if (!density) throw std::invalid_argument("slice: inverse density required for a non-empty x_minus");
  Var minus = diff::select_cols(x, partition.minus);
  return {plus, density->log_prob(minus, plus, pass), false};
}

GenerativeFunnel::GenerativeFunnel(std::size_t dim, std::unique_ptr<densities::GaussianConditional> augment,
                                   bijections::BijectionPtr transform)
    : dim_(dim), augment_dim_(augment ? augment->dim() : 0), augment_(std::move(augment)),
      transform_(std::move(transform)) {
  if (transform_->dim() != dim_) throw std::invalid_argument("generative funnel: transform dimension mismatch");
  if (augment_ && augment_->context_dim() != dim_) {
    throw std::invalid_argument("generative funnel: augmenting density must condition on x");
  }
  if (transform_->context_dim() != 0 && transform_->context_dim() != augment_dim_) {
    throw std::invalid_argument("generative funnel: transform context must be the augmenting coordinates");
  }
}

LayerOutput GenerativeFunnel::forward(const Var& x, const Pass& pass) const {
  check_input(x);
  if (!augment_) {
    bijections::BijectionResult r = transform_->forward(x, Var{}, pass);
    return {r.output, r.log_abs_det, false};
  }
  if (!pass.rng) throw std::invalid_argument("generative funnel: forward pass needs a random stream");
  Var aug = augment_->rsample(x, x.dim(0), *pass.rng, pass);
  Var log_q = augment_->log_prob(aug, x, pass);
  bijections::BijectionResult r = transform_->forward(x, transform_->context_dim() ? aug : Var{}, pass);
  return {diff::concat_cols({r.output, aug}), r.log_abs_det - log_q, false};
}

Tensor GenerativeFunnel::inverse(const Tensor& z, Rng&) const {
  check_latent(z);
  diff::NoGradGuard guard;
  Var zv = diff::constant(z);
  Var main = diff::slice_cols(zv, 0, dim_);
  Var aug = diff::slice_cols(zv, dim_, dim_ + augment_dim_);
  return transform_->inverse(main, transform_->context_dim() ? aug : Var{}, Pass{}).output.value();
}

}  // namespace funnel::funnels
