#include "funnel/bijections/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace funnel::bijections {

namespace {

using diff::Shape;

// [K, K + 1] matrix mapping bin sizes to cumulative knot offsets.
Tensor cumulative_matrix(std::size_t bins) {
  Tensor t(Shape{bins, bins + 1});
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = i + 1; j <= bins; ++j) t.at(i, j) = 1.0;
  }
  return t;
}

Var knot_positions(const Var& raw, double min_size, double tail_bound) {
  const std::size_t bins = raw.dim(1);
  Var sizes = diff::softmax(raw) * (1.0 - min_size * static_cast<double>(bins)) + min_size;
  Var cumulative = diff::matmul(sizes, diff::constant(cumulative_matrix(bins)));
  return cumulative * (2.0 * tail_bound) - tail_bound;
}

std::size_t find_bin(const double* knots, std::size_t bins, double v) {
  const double* it = std::upper_bound(knots, knots + bins + 1, v);
  const std::ptrdiff_t idx = (it - knots) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins) - 1));
}

std::vector<std::size_t> param_rows(std::size_t batch, std::size_t features, std::size_t param_rows) {
  std::vector<std::size_t> rows(batch * features);
  if (param_rows == features) {
    for (std::size_t e = 0; e < rows.size(); ++e) rows[e] = e % features;
  } else if (param_rows == batch * features) {
    for (std::size_t e = 0; e < rows.size(); ++e) rows[e] = e;
  } else {
    throw std::invalid_argument("rq_spline: parameter rows (" + std::to_string(param_rows) +
                                ") must equal features or batch * features");
  }
  return rows;
}

}  // namespace

SplineKnots make_knots(const SplineParams& p) {
  const std::size_t bins = p.widths.dim(1), rows = p.widths.dim(0);
  if (bins < 1 || static_cast<double>(bins) * std::max(kMinBinWidth, kMinBinHeight) >= 1.0) {
    throw std::invalid_argument("rq_spline: unsupported bin count " + std::to_string(bins));
  }
  if (p.heights.shape() != p.widths.shape() || p.derivatives.rank() != 2 || p.derivatives.dim(0) != rows ||
      p.derivatives.dim(1) != bins - 1) {
    throw std::invalid_argument("rq_spline: inconsistent parameter shapes");
  }
  if (!(p.tail_bound > 0.0)) throw std::invalid_argument("rq_spline: tail bound must be positive");

  // softplus(shift) == 1 - kMinDerivative, so zero raw derivatives give slope 1.
  static const double shift = std::log(std::expm1(1.0 - kMinDerivative));
  Var ones = diff::constant(Tensor(Shape{rows, 1}, 1.0));
  Var interior = diff::softplus(p.derivatives + shift) + kMinDerivative;
  return {knot_positions(p.widths, kMinBinWidth, p.tail_bound), knot_positions(p.heights, kMinBinHeight, p.tail_bound),
          diff::concat_cols({ones, interior, ones}), p.tail_bound};
}

BijectionResult rq_spline(const Var& x, const SplineParams& params, bool inverse) {
  if (x.rank() != 2) throw std::invalid_argument("rq_spline: expected a [batch, features] input");
  const std::size_t batch = x.dim(0), features = x.dim(1), n = batch * features;
  const std::size_t bins = params.bins();
  const double bound = params.tail_bound;
  const std::vector<std::size_t> rows = param_rows(batch, features, params.rows());

  if (inverse) {
    SplineKnots k;
    {
      diff::NoGradGuard guard;
      k = make_knots(params);
    }
    const double* kx = k.x.value().data();
    const double* ky = k.y.value().data();
    const double* kd = k.derivative.value().data();
    const double* py = x.value().data();
    Tensor out(Shape{batch, features});
    Tensor logdet(Shape{batch});
    for (std::size_t e = 0; e < n; ++e) {
      const double v = py[e];
      if (v < -bound || v > bound) {
        out[e] = v;
        continue;
      }
      const std::size_t base = rows[e] * (bins + 1);
      const std::size_t b = find_bin(ky + base, bins, v);
      const double x0 = kx[base + b], x1 = kx[base + b + 1];
      const double y0 = ky[base + b], y1 = ky[base + b + 1];
      const double d0 = kd[base + b], d1 = kd[base + b + 1];
      const double w = x1 - x0, h = y1 - y0, s = h / w, dy = v - y0;
      const double a = h * (s - d0) + dy * (d1 + d0 - 2.0 * s);
      const double bq = h * d0 - dy * (d1 + d0 - 2.0 * s);
      const double c = -s * dy;
      const double disc = std::max(bq * bq - 4.0 * a * c, 0.0);
      const double xi = (2.0 * c) / (-bq - std::sqrt(disc));
      const double xo = xi * (1.0 - xi);
      const double denom = s + (d1 + d0 - 2.0 * s) * xo;
      const double dnum = s * s * (d1 * xi * xi + 2.0 * s * xo + d0 * (1.0 - xi) * (1.0 - xi));
      out[e] = xi * w + x0;
      logdet[e / features] -= std::log(dnum) - 2.0 * std::log(denom);
    }
    return {diff::constant(std::move(out)), diff::constant(std::move(logdet))};
  }

  const SplineKnots k = make_knots(params);
  Var flat = diff::reshape(x, Shape{n});
  const double* px = flat.value().data();
  const double* kx = k.x.value().data();
  Tensor inside(Shape{n}), outside(Shape{n});
  std::vector<std::size_t> lo(n), hi(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double v = px[e];
    const bool in = v >= -bound && v <= bound;
    inside[e] = in ? 1.0 : 0.0;
    outside[e] = in ? 0.0 : 1.0;
    lo[e] = find_bin(kx + rows[e] * (bins + 1), bins, std::clamp(v, -bound, bound));
    hi[e] = lo[e] + 1;
  }
  auto at = [&](const Var& knots, const std::vector<std::size_t>& cols) { return diff::gather(knots, rows, cols); };
  Var x0 = at(k.x, lo), x1 = at(k.x, hi);
  Var y0 = at(k.y, lo), y1 = at(k.y, hi);
  Var d0 = at(k.derivative, lo), d1 = at(k.derivative, hi);

  Var xc = diff::clamp(flat, -bound, bound);
  Var w = x1 - x0, h = y1 - y0;
  Var s = h / w;
  Var xi = (xc - x0) / w;
  Var om = 1.0 - xi;
  Var xo = xi * om;
  Var denom = s + (d0 + d1 - 2.0 * s) * xo;
  Var numer = h * (s * diff::square(xi) + d0 * xo);
  Var y_in = y0 + numer / denom;
  Var dnum = diff::square(s) * (d1 * diff::square(xi) + 2.0 * s * xo + d0 * diff::square(om));
  Var logd_in = diff::log(dnum) - 2.0 * diff::log(denom);

  Var m_in = diff::constant(std::move(inside));
  Var m_out = diff::constant(std::move(outside));
  Var y = m_in * y_in + m_out * flat;
  Var logd = m_in * logd_in;
  return {diff::reshape(y, Shape{batch, features}), diff::sum_last(diff::reshape(logd, Shape{batch, features}))};
}

SplineParams identity_spline_params(std::size_t rows, std::size_t bins, double tail_bound) {
  return {diff::constant(Tensor(Shape{rows, bins})), diff::constant(Tensor(Shape{rows, bins})),
          diff::constant(Tensor(Shape{rows, bins - 1})), tail_bound};
}

ElementwiseSpline::ElementwiseSpline(ParamStore& store, const std::string& prefix, std::size_t dim,
                                     std::size_t bins, double tail_bound)
    : dim_(dim), tail_bound_(tail_bound) {
  widths_ = store.add(prefix + ".widths", Tensor(Shape{dim, bins}));
  heights_ = store.add(prefix + ".heights", Tensor(Shape{dim, bins}));
  derivatives_ = store.add(prefix + ".derivatives", Tensor(Shape{dim, bins - 1}));
}

BijectionResult ElementwiseSpline::forward(const Var& x, const Var& context, const Pass&) const {
  check_input(x, context);
  return rq_spline(x, params(), false);
}

BijectionResult ElementwiseSpline::inverse(const Var& y, const Var& context, const Pass&) const {
  check_input(y, context);
  return rq_spline(y, params(), true);
}

}  // namespace funnel::bijections
