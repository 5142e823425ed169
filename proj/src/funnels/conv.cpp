#include "funnel/funnels/conv.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace funnel::funnels {

using diff::Shape;

namespace {
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;

constexpr double kMinAbsDet = 1e-12;

Var to_rows(const Var& per_element, std::size_t batch) {
  return diff::sum_last(diff::reshape(per_element, Shape{batch, per_element.size() / batch}));
}
}  // namespace

std::size_t Conv1DFunnel::check_dims(std::size_t n, Conv1DMode mode) const {
  if (mode == Conv1DMode::stride2 && (n < 2 || n % 2 != 0)) {
    throw std::invalid_argument("conv1d_funnel: stride 2 needs an even input length, got " + std::to_string(n));
  }
  if (mode != Conv1DMode::stride2 && n < 2) throw std::invalid_argument("conv1d_funnel: input length must be >= 2");
  return n;
}

Conv1DFunnel::Conv1DFunnel(ParamStore& store, const std::string& prefix, std::size_t n, Conv1DMode mode, Rng& init,
                           std::size_t hidden, std::size_t depth)
    : n_(check_dims(n, mode)), mode_(mode) {
  std::size_t dim = n / 2, ctx = n / 2;
  if (mode == Conv1DMode::stride1_exact) dim = 1, ctx = n - 1;
  if (mode == Conv1DMode::stride1_chained) dim = 1, ctx = 1;
  init_parameters(store, prefix);
  density_ = std::make_unique<densities::DiagGaussianAnsatz>(store, prefix + ".ansatz", dim, ctx, hidden, depth, init);
}

Conv1DFunnel::Conv1DFunnel(ParamStore& store, const std::string& prefix, std::size_t n, Conv1DMode mode,
                           DensityPtr inverse_density)
    : n_(check_dims(n, mode)), mode_(mode), density_(std::move(inverse_density)) {
  init_parameters(store, prefix);
  const std::size_t expected_dim = mode == Conv1DMode::stride2 ? n / 2 : 1;
  const std::size_t expected_ctx = mode == Conv1DMode::stride2 ? n / 2 : mode == Conv1DMode::stride1_exact ? n - 1 : 1;
  if (!density_ || density_->dim() != expected_dim || density_->context_dim() != expected_ctx) {
    throw std::invalid_argument("conv1d_funnel: inverse density has the wrong dimensions for this mode");
  }
}

void Conv1DFunnel::init_parameters(ParamStore& store, const std::string& prefix) {
  alpha_ = store.add(prefix + ".alpha", Tensor(Shape{1}));
  b_ = store.add(prefix + ".b", Tensor(Shape{1}));
  if (mode_ == Conv1DMode::stride2) {
    for (std::size_t i = 0; i < n_; i += 2) {
      plus_.push_back(i);
      minus_.push_back(i + 1);
    }
  } else if (mode_ == Conv1DMode::stride1_chained) {
    // x_1 is scored given z_1; x_i (i >= 2) given z_{i-1}.
    chain_context_.push_back(0);
    for (std::size_t i = 0; i + 1 < n_; ++i) chain_context_.push_back(i);
  }
}

void Conv1DFunnel::set_kernel(double a, double b) {
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) throw std::domain_error("conv1d_funnel: a must be finite and nonzero");
  sign_ = a < 0.0 ? -1.0 : 1.0;
  alpha_.mutable_value()[0] = std::log(std::abs(a));
  b_.mutable_value()[0] = b;
}

double Conv1DFunnel::a() const { return sign_ * std::exp(alpha_.value()[0]); }
double Conv1DFunnel::b() const { return b_.value()[0]; }

Var Conv1DFunnel::kernel_a() const { return diff::exp(alpha_) * sign_; }

double Conv1DFunnel::log_jacobian() const {
  const double alpha = alpha_.value()[0];
  if (mode_ != Conv1DMode::stride2) return static_cast<double>(n_ - 1) * alpha;
  const double tiles = static_cast<double>(n_ / 2);
  return literal_logdet_ ? std::log(tiles) + alpha : tiles * alpha;
}

LayerOutput Conv1DFunnel::forward(const Var& x, const Pass& pass) const {
  check_input(x);
  const std::size_t batch = x.dim(0);
  const Var a = kernel_a();
  if (mode_ == Conv1DMode::stride2) {
    Var plus = diff::select_cols(x, plus_);
    Var minus = diff::select_cols(x, minus_);
    Var z = plus * a + minus * b_;
    const double tiles = static_cast<double>(n_ / 2);
    Var logdet = literal_logdet_ ? alpha_ + std::log(tiles) : alpha_ * tiles;
    return {z, density_->log_prob(minus, z, pass) + bijections::broadcast_to_batch(logdet, batch), false};
  }
  Var z = diff::slice_cols(x, 0, n_ - 1) * a + diff::slice_cols(x, 1, n_) * b_;
  Var logdet = bijections::broadcast_to_batch(alpha_ * static_cast<double>(n_ - 1), batch);
  if (mode_ == Conv1DMode::stride1_exact) {
    return {z, density_->log_prob(diff::slice_cols(x, n_ - 1, n_), z, pass) + logdet, false};
  }
  Var targets = diff::reshape(x, Shape{batch * n_, 1});
  Var context = diff::reshape(diff::select_cols(z, chain_context_), Shape{batch * n_, 1});
  return {z, to_rows(density_->log_prob(targets, context, pass), batch) + logdet, true};
}

std::vector<double> Conv1DFunnel::stride1_recover(double a, double b, const std::vector<double>& z, double x_last) {
  if (a == 0.0) throw std::domain_error("conv1d_funnel: a must be nonzero");
  std::vector<double> x(z.size() + 1);
  x.back() = x_last;
  for (std::size_t i = z.size(); i-- > 0;) x[i] = (z[i] - b * x[i + 1]) / a;
  return x;
}

Tensor Conv1DFunnel::inverse(const Tensor& z, Rng& rng) const {
  check_latent(z);
  diff::NoGradGuard guard;
  const std::size_t batch = z.dim(0), m = z.dim(1);
  const double av = a(), bv = b();
  Var zv = diff::constant(z);
  Tensor x(Shape{batch, n_});
  if (mode_ == Conv1DMode::stride2) {
    Tensor minus = density_->sample(batch, zv, rng);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t i = 0; i < m; ++i) {
        x.at(r, minus_[i]) = minus.at(r, i);
        x.at(r, plus_[i]) = (z.at(r, i) - bv * minus.at(r, i)) / av;
      }
    }
    return x;
  }
  if (mode_ == Conv1DMode::stride1_exact) {
    Tensor last = density_->sample(batch, zv, rng);
    std::vector<double> zr(m);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t i = 0; i < m; ++i) zr[i] = z.at(r, i);
      const std::vector<double> xr = stride1_recover(av, bv, zr, last[r]);
      for (std::size_t i = 0; i < n_; ++i) x.at(r, i) = xr[i];
    }
    return x;
  }
  Var context = diff::reshape(diff::select_cols(zv, chain_context_), Shape{batch * n_, 1});
  return density_->sample(batch * n_, context, rng).reshaped(Shape{batch, n_});
}

ConvKxKFunnel::ConvKxKFunnel(ParamStore& store, const std::string& prefix, std::size_t height, std::size_t width,
                             std::size_t channels, std::size_t k, Rng& init, std::size_t hidden, std::size_t depth)
    : height_(height), width_(width), channels_(channels), k_(k) {
  init_layout(store, prefix);
  Tensor& w = kernel_.mutable_value();
  const double bound = 0.1 / std::sqrt(static_cast<double>(k * k * channels));
  for (std::size_t o = 0; o < channels; ++o) {
    for (std::size_t col = 0; col < k * k * channels; ++col) w.at(o, col) = bound * (2.0 * init.uniform() - 1.0);
  }
  for (std::size_t o = 0; o < channels; ++o) {
    for (std::size_t c = 0; c < channels; ++c) w.at(o, plus_cols_[c]) = o == c ? 1.0 : 0.0;
  }
  density_ = std::make_unique<densities::DiagGaussianAnsatz>(store, prefix + ".ansatz", (k * k - 1) * channels,
                                                             context_width(), hidden, depth, init);
}

ConvKxKFunnel::ConvKxKFunnel(ParamStore& store, const std::string& prefix, std::size_t height, std::size_t width,
                             std::size_t channels, std::size_t k, DensityPtr inverse_density)
    : height_(height), width_(width), channels_(channels), k_(k), density_(std::move(inverse_density)) {
  init_layout(store, prefix);
  for (std::size_t c = 0; c < channels; ++c) kernel_.mutable_value().at(c, plus_cols_[c]) = 1.0;
  if (!density_ || density_->dim() != (k * k - 1) * channels || density_->context_dim() != context_width()) {
    throw std::invalid_argument("convkxk_funnel: inverse density has the wrong dimensions");
  }
}

void ConvKxKFunnel::init_layout(ParamStore& store, const std::string& prefix) {
  if (k_ < 2) throw std::invalid_argument("convkxk_funnel: kernel size must be >= 2");
  if (channels_ == 0 || height_ == 0 || width_ == 0 || height_ % k_ != 0 || width_ % k_ != 0) {
    throw std::invalid_argument("convkxk_funnel: image extents must be positive multiples of the kernel size");
  }
  const std::size_t c = channels_, per_tile = k_ * k_ * c;
  kernel_ = store.add(prefix + ".kernel", Tensor(Shape{c, per_tile}));
  const std::size_t th_n = latent_height(), tw_n = latent_width();
  for (std::size_t th = 0; th < th_n; ++th) {
    for (std::size_t tw = 0; tw < tw_n; ++tw) {
      for (std::size_t di = 0; di < k_; ++di) {
        for (std::size_t dj = 0; dj < k_; ++dj) {
          for (std::size_t ch = 0; ch < c; ++ch) {
            tile_gather_.push_back(((th * k_ + di) * width_ + (tw * k_ + dj)) * c + ch);
          }
        }
      }
    }
  }
  const std::size_t designated = k_ * k_ - 1;
  for (std::size_t p = 0; p < k_ * k_; ++p) {
    for (std::size_t ch = 0; ch < c; ++ch) (p == designated ? plus_cols_ : minus_cols_).push_back(p * c + ch);
  }
  const std::size_t pad = tiles() * c;
  for (std::size_t th = 0; th < th_n; ++th) {
    for (std::size_t tw = 0; tw < tw_n; ++tw) {
      for (int dh = -1; dh <= 1; ++dh) {
        for (int dw = -1; dw <= 1; ++dw) {
          const auto h = static_cast<std::ptrdiff_t>(th) + dh, w = static_cast<std::ptrdiff_t>(tw) + dw;
          const bool inside = h >= 0 && w >= 0 && h < static_cast<std::ptrdiff_t>(th_n) &&
                              w < static_cast<std::ptrdiff_t>(tw_n);
          for (std::size_t ch = 0; ch < c; ++ch) {
            neighbour_gather_.push_back(inside ? (static_cast<std::size_t>(h) * tw_n + static_cast<std::size_t>(w)) * c + ch
                                               : pad);
          }
        }
      }
    }
  }
}

Tensor ConvKxKFunnel::jacobian() const {
  diff::NoGradGuard guard;
  return diff::select_cols(kernel_, plus_cols_).value();
}

double ConvKxKFunnel::log_abs_det_jacobian() const {
  const Tensor j = jacobian();
  const Eigen::Index c = static_cast<Eigen::Index>(channels_);
  const double det = ConstMap(j.data(), c, c).partialPivLu().determinant();
  if (!(std::abs(det) > kMinAbsDet)) {
    throw std::domain_error("convkxk_funnel: |det J| = " + std::to_string(std::abs(det)) + " is below 1e-12");
  }
  return std::log(std::abs(det));
}

Var ConvKxKFunnel::neighbourhood(const Var& z) const {
  const std::size_t batch = z.dim(0);
  Var padded = diff::concat_cols({z, diff::constant(Tensor(Shape{batch, 1}))});
  return diff::reshape(diff::select_cols(padded, neighbour_gather_), Shape{batch * tiles(), context_width()});
}

LayerOutput ConvKxKFunnel::forward(const Var& x, const Pass& pass) const {
  check_input(x);
  log_abs_det_jacobian();
  const std::size_t batch = x.dim(0), t = tiles(), per_tile = k_ * k_ * channels_;
  Var tile_rows = diff::reshape(diff::select_cols(x, tile_gather_), Shape{batch * t, per_tile});
  Var z = diff::reshape(diff::matmul(tile_rows, diff::transpose(kernel_)), Shape{batch, t * channels_});
  Var minus = diff::select_cols(tile_rows, minus_cols_);
  Var log_p = to_rows(density_->log_prob(minus, neighbourhood(z), pass), batch);
  Var logdet = diff::log_abs_det(diff::select_cols(kernel_, plus_cols_)) * static_cast<double>(t);
  return {z, log_p + bijections::broadcast_to_batch(logdet, batch), false};
}

Tensor ConvKxKFunnel::inverse(const Tensor& z, Rng& rng) const {
  check_latent(z);
  log_abs_det_jacobian();
  diff::NoGradGuard guard;
  const std::size_t batch = z.dim(0), t = tiles(), c = channels_, per_tile = k_ * k_ * c;
  const std::size_t rows = batch * t, nminus = minus_cols_.size();
  Var zv = diff::constant(z);
  const Tensor minus = density_->sample(rows, neighbourhood(zv), rng);
  const Tensor j = jacobian();
  const Tensor k_minus = diff::select_cols(kernel_, minus_cols_).value();

  const Eigen::Index ci = static_cast<Eigen::Index>(c), ri = static_cast<Eigen::Index>(rows);
  // Row r of rhs: z_r - K_minus x_minus_r; then J x_plus_r = rhs_r.
  RowMatrix rhs = ConstMap(z.data(), ri, ci) -
                  ConstMap(minus.data(), ri, static_cast<Eigen::Index>(nminus)) *
                      ConstMap(k_minus.data(), ci, static_cast<Eigen::Index>(nminus)).transpose();
  const RowMatrix plus = ConstMap(j.data(), ci, ci).partialPivLu().solve(rhs.transpose()).transpose();

  Tensor x(Shape{batch, input_dim()});
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t b = r / t, tile = r % t;
    const std::size_t* gather = tile_gather_.data() + tile * per_tile;
    for (std::size_t q = 0; q < nminus; ++q) x.at(b, gather[minus_cols_[q]]) = minus.at(r, q);
    for (std::size_t q = 0; q < c; ++q) {
      x.at(b, gather[plus_cols_[q]]) = plus(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q));
    }
  }
  return x;
}

}  // namespace funnel::funnels
