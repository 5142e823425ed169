#pragma once

#include <functional>

#include "funnel/diff/param_store.hpp"
#include "funnel/diff/var.hpp"

namespace funnel::diff {

using ScalarFunction = std::function<Var(const Var&)>;

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|)
/// for a scalar function of one tensor argument.
double grad_check(const ScalarFunction& f, const Tensor& point, double step = 1e-5);

/// Same measure for every trainable parameter in `store`, where `loss`
/// rebuilds the scalar objective from the current parameter values.
double grad_check_params(const std::function<Var()>& loss, ParamStore& store, double step = 1e-5);

}  // namespace funnel::diff
