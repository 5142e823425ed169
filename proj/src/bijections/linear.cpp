#include "funnel/bijections/linear.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace funnel::bijections {

using diff::Shape;

namespace {
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;
}  // namespace

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& permutation) {
  std::vector<std::size_t> inverse(permutation.size(), permutation.size());
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (permutation[i] >= permutation.size() || inverse[permutation[i]] != permutation.size()) {
      throw std::invalid_argument("not a permutation");
    }
    inverse[permutation[i]] = i;
  }
  return inverse;
}

LULinear::LULinear(ParamStore& store, const std::string& prefix, std::size_t dim,
                   std::vector<std::size_t> permutation, std::vector<double> diagonal_signs)
    : dim_(dim),
      permutation_(std::move(permutation)),
      signs_(Shape{dim}, 1.0),
      lower_mask_(Shape{dim, dim}),
      upper_mask_(Shape{dim, dim}) {
  if (permutation_.empty()) {
    permutation_.resize(dim);
    std::iota(permutation_.begin(), permutation_.end(), 0);
  }
  if (permutation_.size() != dim) throw std::invalid_argument("lu_linear: permutation size mismatch");
  inverse_permutation_ = invert_permutation(permutation_);
  if (!diagonal_signs.empty()) {
    if (diagonal_signs.size() != dim) throw std::invalid_argument("lu_linear: sign vector size mismatch");
    for (std::size_t i = 0; i < dim; ++i) signs_[i] = diagonal_signs[i] < 0 ? -1.0 : 1.0;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      lower_mask_.at(i, j) = j < i ? 1.0 : 0.0;
      upper_mask_.at(i, j) = j > i ? 1.0 : 0.0;
    }
  }
  lower_ = store.add(prefix + ".lower", Tensor(Shape{dim, dim}));
  upper_ = store.add(prefix + ".upper", Tensor(Shape{dim, dim}));
  log_diag_ = store.add(prefix + ".log_diag", Tensor(Shape{dim}));
}

Var LULinear::matrix() const {
  Var l = lower_ * diff::constant(lower_mask_) + diff::constant(Tensor::identity(dim_));
  Var diag = diff::constant(Tensor::identity(dim_)) * (diff::exp(log_diag_) * diff::constant(signs_));
  Var u = upper_ * diff::constant(upper_mask_) + diag;
  return diff::matmul(l, u);
}

Var LULinear::log_abs_det() const { return diff::sum(log_diag_); }

BijectionResult LULinear::forward(const Var& x, const Var& context, const Pass&) const {
  check_input(x, context);
  Var y = diff::matmul(x, diff::transpose(matrix()));
  return {diff::select_cols(y, permutation_), broadcast_to_batch(log_abs_det(), x.dim(0))};
}

Tensor LULinear::solve(const Tensor& rhs) const {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_);
  const Eigen::Index batch = static_cast<Eigen::Index>(rhs.dim(0));
  RowMatrix l = RowMatrix::Identity(n, n);
  RowMatrix u = RowMatrix::Zero(n, n);
  const Tensor& lv = lower_.value();
  const Tensor& uv = upper_.value();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      if (j < i) l(i, j) = lv.at(ui, uj);
      if (j > i) u(i, j) = uv.at(ui, uj);
    }
    u(i, i) = signs_[static_cast<std::size_t>(i)] * std::exp(log_diag_.value()[static_cast<std::size_t>(i)]);
  }
  // Rows of rhs are right-hand sides: solve (LU) X^T = rhs^T.
  RowMatrix b = ConstMap(rhs.data(), batch, n).transpose();
  l.triangularView<Eigen::UnitLower>().solveInPlace(b);
  u.triangularView<Eigen::Upper>().solveInPlace(b);
  Tensor out(Shape{rhs.dim(0), dim_});
  Map(out.data(), batch, n) = b.transpose();
  return out;
}

BijectionResult LULinear::inverse(const Var& y, const Var& context, const Pass&) const {
  check_input(y, context);
  diff::NoGradGuard guard;
  Var unpermuted = diff::select_cols(y, inverse_permutation_);
  Tensor x = solve(unpermuted.value());
  return {diff::constant(std::move(x)), broadcast_to_batch(-log_abs_det(), y.dim(0))};
}

ActNorm::ActNorm(ParamStore& store, const std::string& prefix, std::size_t dim) : dim_(dim) {
  shift_ = store.add(prefix + ".shift", Tensor(Shape{dim}));
  log_scale_ = store.add(prefix + ".log_scale", Tensor(Shape{dim}));
  initialized_ = store.add(prefix + ".initialized", Tensor(Shape{1}), false);
}

void ActNorm::initialize(const Tensor& batch) const {
  const std::size_t n = batch.dim(0);
  if (n < 2) throw std::invalid_argument("actnorm: initialization needs at least two rows");
  Tensor shift(Shape{dim_}), log_scale(Shape{dim_});
  for (std::size_t j = 0; j < dim_; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += batch.at(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (batch.at(i, j) - mean) * (batch.at(i, j) - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0)) {
      throw std::invalid_argument("actnorm: feature " + std::to_string(j) + " has zero variance in the init batch");
    }
    shift[j] = mean;
    log_scale[j] = -0.5 * std::log(var);
  }
  Var s = shift_, l = log_scale_, f = initialized_;
  s.mutable_value() = std::move(shift);
  l.mutable_value() = std::move(log_scale);
  f.mutable_value()[0] = 1.0;
}

BijectionResult ActNorm::forward(const Var& x, const Var& context, const Pass&) const {
  check_input(x, context);
  if (!initialized()) initialize(x.value());
  Var y = (x - shift_) * diff::exp(log_scale_);
  return {y, broadcast_to_batch(diff::sum(log_scale_), x.dim(0))};
}

BijectionResult ActNorm::inverse(const Var& y, const Var& context, const Pass&) const {
  check_input(y, context);
  diff::NoGradGuard guard;
  Var x = y * diff::exp(-log_scale_) + shift_;
  return {x, broadcast_to_batch(-diff::sum(log_scale_), y.dim(0))};
}

FixedPermutation::FixedPermutation(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  permutation_ = rng.permutation(dim);
  inverse_ = invert_permutation(permutation_);
}

FixedPermutation::FixedPermutation(std::vector<std::size_t> permutation)
    : permutation_(std::move(permutation)), inverse_(invert_permutation(permutation_)) {}

BijectionResult FixedPermutation::forward(const Var& x, const Var& context, const Pass&) const {
  check_input(x, context);
  return {diff::select_cols(x, permutation_), zeros_for_batch(x)};
}

BijectionResult FixedPermutation::inverse(const Var& y, const Var& context, const Pass&) const {
  check_input(y, context);
  return {diff::select_cols(y, inverse_), zeros_for_batch(y)};
}

}  // namespace funnel::bijections
