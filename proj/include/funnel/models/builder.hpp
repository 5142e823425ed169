#pragma once

#include <json.hpp>
#include <memory>

#include "funnel/models/flow_model.hpp"

namespace funnel::models {

/// Model configuration record. Field names mirror the JSON keys; unknown keys
/// are rejected.
struct ModelSpec {
  /// identity | affine | nsf | fmlp | vae | conv_funnel
  std::string kind = "nsf";
  std::size_t flow_steps = 4;
  std::size_t hidden_features = 64;
  std::size_t residual_blocks = 2;
  std::size_t bins = 8;
  double tail_bound = 3.0;
  /// Flow step replaced by the funnel; -1 for none, flow_steps to append.
  int funnel_level = -1;
  /// Features dropped by the funnel.
  std::size_t dim_reduction = 0;
  /// Inverse density of flow funnels: gaussian | flow
  std::string inverse_density = "gaussian";
  std::size_t ansatz_hidden = 64;
  std::size_t ansatz_depth = 2;
  bool actnorm = false;
  bool lu_linear = true;
  /// Final latent size for fmlp / vae / conv_funnel (0 = input - dim_reduction).
  std::size_t latent_dim = 0;
  /// Explicit F-MLP output widths; empty selects the default schedule.
  std::vector<std::size_t> fmlp_widths;
  /// exact | lower_bound
  std::string fmlp_mode = "exact";
  std::size_t activation_bins = 10;
  double activation_tail_bound = 2.0;
  std::size_t vae_width = 256;
  std::size_t vae_depth = 2;
  /// [H, W, C] for conv_funnel.
  std::vector<std::size_t> image_shape;
  std::size_t conv_levels = 1;

  static ModelSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// A model together with the parameters it owns.
struct BuiltModel {
  ModelSpec spec;
  std::size_t input_dim = 0;
  std::uint64_t seed = 0;
  double dropout = 0.0;
  std::unique_ptr<ParamStore> store;
  std::unique_ptr<DensityModel> model;
};

/// Deterministic in (spec, input_dim, seed, dropout).
BuiltModel build_model(const ModelSpec& spec, std::size_t input_dim, std::uint64_t seed, double dropout = 0.0);

/// The F-MLP width schedule for n inputs and a latent of size l: two
/// dimension-preserving layers, a reduction to (n + l) / 2, one preserving
/// layer, a reduction to l, three preserving layers.
std::vector<std::size_t> default_fmlp_widths(std::size_t n, std::size_t latent);

}  // namespace funnel::models
