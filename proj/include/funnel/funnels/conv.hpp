#pragma once

#include "funnel/funnels/funnel.hpp"

namespace funnel::funnels {

using diff::ParamStore;

enum class Conv1DMode {
  stride2,          // z_i = a x_{2i-1} + b x_{2i}
  stride1_exact,    // z_i = a x_i + b x_{i+1}, x_n reconstructed, recursion inverse
  stride1_chained,  // same map, shared per-position ansatz over all of x (lower bound)
};

/// 1-D two-tap kernel [a, b] as a funnel, a = sign * exp(alpha).
/// Stride 2 maps n -> n/2 with x_plus the first coordinate of each tile.
/// Stride 1 maps n -> n - 1.
class Conv1DFunnel final : public Layer {
 public:
  /// Default inverse density: a diagonal Gaussian ansatz (`hidden`, `depth`).
  Conv1DFunnel(ParamStore& store, const std::string& prefix, std::size_t n, Conv1DMode mode, Rng& init,
               std::size_t hidden = 32, std::size_t depth = 2);
  Conv1DFunnel(ParamStore& store, const std::string& prefix, std::size_t n, Conv1DMode mode,
               DensityPtr inverse_density);

  std::size_t input_dim() const override { return n_; }
  std::size_t output_dim() const override { return mode_ == Conv1DMode::stride2 ? n_ / 2 : n_ - 1; }
  std::string name() const override { return "conv1d_funnel"; }
  LayerOutput forward(const Var& x, const Pass& pass) const override;
  Tensor inverse(const Tensor& z, Rng& rng) const override;
  bool exact() const override { return mode_ != Conv1DMode::stride1_chained; }

  /// Sets a (nonzero) and b.
  void set_kernel(double a, double b);
  double a() const;
  double b() const;
  /// Diagnostic: replaces the per-tile sum (n/2) ln|a| with ln((n/2)|a|).
  void set_literal_logdet(bool on) noexcept { literal_logdet_ = on; }
  /// Jacobian term of one row.
  double log_jacobian() const;

  /// Stride-1 recursion x_{i} = (z_i - b x_{i+1}) / a from a given x_n.
  static std::vector<double> stride1_recover(double a, double b, const std::vector<double>& z, double x_last);

 private:
  void init_parameters(ParamStore& store, const std::string& prefix);
  std::size_t check_dims(std::size_t n, Conv1DMode mode) const;
  Var kernel_a() const;

  std::size_t n_;
  Conv1DMode mode_;
  double sign_ = 1.0;
  bool literal_logdet_ = false;
  Var alpha_, b_;
  DensityPtr density_;
  std::vector<std::size_t> plus_, minus_, chain_context_;
};

/// k x k kernel with stride k on an H x W x C image flattened as
/// (h * W + w) * C + c. Per tile, x_plus is the C values at the designated
/// pixel (bottom-right by default) and the Jacobian is the C x C block of the
/// kernel at that pixel. The remaining (k^2 - 1) C values of each tile are
/// reconstructed by one ansatz shared across tiles, conditioned on the 3 x 3
/// neighbourhood of the tile's latent pixel (zero padded).
class ConvKxKFunnel final : public Layer {
 public:
  ConvKxKFunnel(ParamStore& store, const std::string& prefix, std::size_t height, std::size_t width,
                std::size_t channels, std::size_t k, Rng& init, std::size_t hidden = 64, std::size_t depth = 2);
  ConvKxKFunnel(ParamStore& store, const std::string& prefix, std::size_t height, std::size_t width,
                std::size_t channels, std::size_t k, DensityPtr inverse_density);

  std::size_t input_dim() const override { return height_ * width_ * channels_; }
  std::size_t output_dim() const override { return tiles() * channels_; }
  std::string name() const override { return "convkxk_funnel"; }
  LayerOutput forward(const Var& x, const Pass& pass) const override;
  Tensor inverse(const Tensor& z, Rng& rng) const override;

  std::size_t tiles() const noexcept { return (height_ / k_) * (width_ / k_); }
  std::size_t latent_height() const noexcept { return height_ / k_; }
  std::size_t latent_width() const noexcept { return width_ / k_; }
  std::size_t channels() const noexcept { return channels_; }
  /// Kernel [C_out, k * k * C_in]; column (p * C + c_in) with p = di * k + dj.
  const Var& kernel() const noexcept { return kernel_; }
  /// Designated C x C block.
  Tensor jacobian() const;
  /// log|det J| per tile.
  double log_abs_det_jacobian() const;
  std::size_t context_width() const noexcept { return 9 * channels_; }

 private:
  void init_layout(ParamStore& store, const std::string& prefix);
  Var neighbourhood(const Var& z) const;

  std::size_t height_, width_, channels_, k_;
  Var kernel_;
  DensityPtr density_;
  std::vector<std::size_t> tile_gather_, plus_cols_, minus_cols_, neighbour_gather_;
};

}  // namespace funnel::funnels
