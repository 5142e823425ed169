#include "funnel/bijections/bijection.hpp"

#include <stdexcept>

namespace funnel::bijections {

void Bijection::check_input(const Var& x, const Var& context) const {
  if (x.rank() != 2 || x.dim(1) != dim()) {
    throw std::invalid_argument(name() + ": expected [batch, " + std::to_string(dim()) + "] input, got " +
                                diff::shape_string(x.shape()));
  }
  if (context_dim() == 0) return;
  if (!context || context.rank() != 2 || context.dim(1) != context_dim() || context.dim(0) != x.dim(0)) {
    throw std::invalid_argument(name() + ": expected [" + std::to_string(x.dim(0)) + ", " +
                                std::to_string(context_dim()) + "] context");
  }
}

Var zeros_for_batch(const Var& x) { return diff::constant(Tensor(diff::Shape{x.dim(0)})); }

Var broadcast_to_batch(const Var& scalar, std::size_t batch) {
  return diff::constant(Tensor(diff::Shape{batch})) + scalar;
}

Chain::Chain(std::size_t dim, std::size_t context_dim, std::vector<BijectionPtr> steps)
    : dim_(dim), context_dim_(context_dim), steps_(std::move(steps)) {
  for (const BijectionPtr& s : steps_) {
    if (s->dim() != dim_) throw std::invalid_argument("chain: step '" + s->name() + "' has mismatched dimension");
    if (s->context_dim() != 0 && s->context_dim() != context_dim_) {
      throw std::invalid_argument("chain: step '" + s->name() + "' has mismatched context dimension");
    }
  }
}

BijectionResult Chain::forward(const Var& x, const Var& context, const Pass& pass) const {
  check_input(x, context);
  Var h = x;
  Var total = zeros_for_batch(x);
  for (const BijectionPtr& s : steps_) {
    BijectionResult r = s->forward(h, s->context_dim() ? context : Var{}, pass);
    h = r.output;
    total = total + r.log_abs_det;
  }
  return {h, total};
}

BijectionResult Chain::inverse(const Var& y, const Var& context, const Pass& pass) const {
  check_input(y, context);
  Var h = y;
  Var total = zeros_for_batch(y);
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    BijectionResult r = (*it)->inverse(h, (*it)->context_dim() ? context : Var{}, pass);
    h = r.output;
    total = total + r.log_abs_det;
  }
  return {h, total};
}

BijectionResult Identity::forward(const Var& x, const Var& context, const Pass&) const {
  check_input(x, context);
  return {x, zeros_for_batch(x)};
}

BijectionResult Identity::inverse(const Var& y, const Var& context, const Pass&) const {
  check_input(y, context);
  return {y, zeros_for_batch(y)};
}

}  // namespace funnel::bijections
