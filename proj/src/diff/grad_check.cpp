#include "funnel/diff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace funnel::diff {

double grad_check(const ScalarFunction& f, const Tensor& point, double step) {
  Var x(point, true);
  Var y = f(x);
  if (y.size() != 1) throw std::invalid_argument("grad_check: function must be scalar-valued");
  backward(y);
  const Tensor analytic = x.grad().shape() == point.shape() ? x.grad() : Tensor(point.shape());

  double worst = 0.0;
  Tensor probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double up = f(constant(probe)).item();
    probe[i] = saved - step;
    const double down = f(constant(probe)).item();
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

double grad_check_params(const std::function<Var()>& loss, ParamStore& store, double step) {
  store.zero_grad();
  backward(loss());
  double worst = 0.0;
  for (Parameter& p : store.entries()) {
    if (!p.trainable) continue;
    const Tensor analytic = p.var.grad();
    Tensor& value = p.var.mutable_value();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      double up = 0.0, down = 0.0;
      {
        NoGradGuard guard;
        value[i] = saved + step;
        up = loss().item();
        value[i] = saved - step;
        down = loss().item();
      }
      value[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i])));
    }
  }
  return worst;
}

}  // namespace funnel::diff
