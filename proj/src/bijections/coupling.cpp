#include "funnel/bijections/coupling.hpp"

#include <stdexcept>

#include "funnel/bijections/spline.hpp"

namespace funnel::bijections {

using diff::Shape;

std::vector<bool> half_mask(std::size_t dim, bool parity) {
  std::vector<bool> mask(dim, false);
  const std::size_t split = dim / 2;
  for (std::size_t i = 0; i < dim; ++i) mask[i] = parity ? (i < split) : (i >= split);
  return mask;
}

Coupling::Coupling(ParamStore& store, const std::string& prefix, std::vector<bool> mask, std::size_t context_dim,
                   std::size_t params_per_feature, const ConditionerSpec& spec, Rng& init)
    : mask_(std::move(mask)), context_dim_(context_dim) {
  for (std::size_t i = 0; i < mask_.size(); ++i) (mask_[i] ? transformed_ : identity_).push_back(i);
  if (transformed_.empty()) throw std::invalid_argument("coupling: mask selects no features");
  if (identity_.empty() && context_dim_ == 0) {
    throw std::invalid_argument("coupling: needs untransformed features or a context to condition on");
  }
  // Output column order is [identity..., transformed...]; restore_ undoes it.
  restore_.resize(mask_.size());
  for (std::size_t k = 0; k < identity_.size(); ++k) restore_[identity_[k]] = k;
  for (std::size_t k = 0; k < transformed_.size(); ++k) restore_[transformed_[k]] = identity_.size() + k;
  conditioner_ = nn::ResidualNet(store, prefix + ".conditioner", identity_.size() + context_dim_,
                                 transformed_.size() * params_per_feature, spec.hidden, spec.blocks, spec.activation,
                                 spec.dropout, init, true);
}

Var Coupling::conditioner_input(const Var& identity_part, const Var& context) const {
  if (identity_.empty()) return context;
  if (context_dim_ == 0) return identity_part;
  return diff::concat_cols({identity_part, context});
}

BijectionResult Coupling::forward(const Var& x, const Var& context, const Pass& pass) const {
  check_input(x, context);
  Var keep = diff::select_cols(x, identity_);
  Var raw = conditioner_(conditioner_input(keep, context), pass);
  BijectionResult r = transform(diff::select_cols(x, transformed_), raw, false);
  return {diff::select_cols(diff::concat_cols({keep, r.output}), restore_), r.log_abs_det};
}

BijectionResult Coupling::inverse(const Var& y, const Var& context, const Pass& pass) const {
  check_input(y, context);
  diff::NoGradGuard guard;
  Var keep = diff::select_cols(y, identity_);
  Var raw = conditioner_(conditioner_input(keep, context), pass);
  BijectionResult r = transform(diff::select_cols(y, transformed_), raw, true);
  return {diff::select_cols(diff::concat_cols({keep, r.output}), restore_), r.log_abs_det};
}

AffineCoupling::AffineCoupling(ParamStore& store, const std::string& prefix, std::vector<bool> mask,
                               std::size_t context_dim, const ConditionerSpec& spec, Rng& init)
    : Coupling(store, prefix, std::move(mask), context_dim, 2, spec, init) {}

BijectionResult AffineCoupling::transform(const Var& x, const Var& raw, bool inverse) const {
  const std::size_t t = transformed_count();
  Var log_scale = diff::slice_cols(raw, 0, t);
  Var shift = diff::slice_cols(raw, t, 2 * t);
  Var logdet = diff::sum_last(log_scale);
  if (inverse) return {(x - shift) * diff::exp(-log_scale), -logdet};
  return {x * diff::exp(log_scale) + shift, logdet};
}

SplineCoupling::SplineCoupling(ParamStore& store, const std::string& prefix, std::vector<bool> mask,
                               std::size_t context_dim, std::size_t bins, double tail_bound,
                               const ConditionerSpec& spec, Rng& init)
    : Coupling(store, prefix, std::move(mask), context_dim, 3 * bins - 1, spec, init),
      bins_(bins),
      tail_bound_(tail_bound) {}

BijectionResult SplineCoupling::transform(const Var& x, const Var& raw, bool inverse) const {
  const std::size_t batch = x.dim(0), t = transformed_count(), per = 3 * bins_ - 1;
  Var flat = diff::reshape(raw, Shape{batch * t, per});
  SplineParams params{diff::slice_cols(flat, 0, bins_), diff::slice_cols(flat, bins_, 2 * bins_),
                      diff::slice_cols(flat, 2 * bins_, per), tail_bound_};
  return rq_spline(x, params, inverse);
}

}  // namespace funnel::bijections
