#include "funnel/models/builder.hpp"

#include <set>
#include <stdexcept>

#include "funnel/bijections/coupling.hpp"
#include "funnel/bijections/linear.hpp"
#include "funnel/bijections/spline.hpp"
#include "funnel/funnels/conv.hpp"
#include "funnel/funnels/fmlp.hpp"
#include "funnel/funnels/funnel.hpp"

namespace funnel::models {

using bijections::BijectionPtr;
using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

class Builder {
 public:
  Builder(const ModelSpec& spec, ParamStore& store, std::uint64_t seed, double dropout)
      : spec_(spec), store_(store), init_(Rng(seed).fork(11)), perm_seeds_(Rng(seed).fork(12)), dropout_(dropout) {
    conditioner_.hidden = spec.hidden_features;
    conditioner_.blocks = spec.residual_blocks;
    conditioner_.dropout = dropout;
  }

  std::string next(const std::string& what) { return "l" + std::to_string(counter_++) + "." + what; }

  BijectionPtr coupling(std::size_t dim, std::size_t context, bool parity, const bijections::ConditionerSpec& cond,
                        std::size_t bins) {
    std::vector<bool> mask = dim == 1 ? std::vector<bool>{true} : bijections::half_mask(dim, parity);
    if (spec_.kind == "affine") {
      return std::make_unique<bijections::AffineCoupling>(store_, next("affine_coupling"), mask, context, cond, init_);
    }
    return std::make_unique<bijections::SplineCoupling>(store_, next("spline_coupling"), mask, context, bins,
                                                        spec_.tail_bound, cond, init_);
  }

  void flow_step(std::vector<LayerPtr>& layers, std::size_t dim, std::size_t step) {
    if (dim == 1) {
      if (spec_.kind == "affine") {
        layers.push_back(wrap(std::make_unique<bijections::LULinear>(store_, next("lu_linear"), 1)));
      } else {
        layers.push_back(
            wrap(std::make_unique<bijections::ElementwiseSpline>(store_, next("spline"), 1, spec_.bins, spec_.tail_bound)));
      }
      return;
    }
    layers.push_back(wrap(coupling(dim, 0, step % 2 == 0, conditioner_, spec_.bins)));
    if (spec_.lu_linear) layers.push_back(wrap(std::make_unique<bijections::LULinear>(store_, next("lu_linear"), dim)));
  }

  LayerPtr flow_funnel(std::size_t dim) {
    const std::size_t r = spec_.dim_reduction;
    if (r == 0 || r >= dim) throw std::invalid_argument("model: dim_reduction must be in [1, dim)");
    const std::size_t d = dim - r;
    std::vector<BijectionPtr> f;
    f.push_back(coupling(d, r, true, conditioner_, spec_.bins));
    if (d > 1) f.push_back(coupling(d, r, false, conditioner_, spec_.bins));
    auto transform = std::make_unique<bijections::Chain>(d, r, std::move(f));

    densities::DensityPtr density;
    if (spec_.inverse_density == "gaussian") {
      density = std::make_unique<densities::DiagGaussianAnsatz>(store_, next("ansatz"), r, d, spec_.ansatz_hidden,
                                                                spec_.ansatz_depth, init_, dropout_);
    } else if (spec_.inverse_density == "flow") {
      bijections::ConditionerSpec small = conditioner_;
      small.hidden = std::max<std::size_t>(1, spec_.hidden_features / 3);
      std::vector<BijectionPtr> steps;
      const std::size_t n_steps = std::max<std::size_t>(1, spec_.flow_steps / 2);
      for (std::size_t s = 0; s < n_steps; ++s) steps.push_back(coupling(r, d, s % 2 == 0, small, spec_.bins));
      density = std::make_unique<densities::ConditionalFlowDensity>(r, d, std::move(steps));
    } else {
      throw std::invalid_argument("model: inverse_density must be 'gaussian' or 'flow'");
    }
    return std::make_unique<funnels::FunnelLayer>(funnels::PartitionSpec::leading(dim, r), std::move(transform),
                                                  std::move(density));
  }

  std::vector<LayerPtr> flow(std::size_t dim) {
    std::vector<LayerPtr> layers;
    if (spec_.actnorm) layers.push_back(wrap(std::make_unique<bijections::ActNorm>(store_, next("actnorm"), dim)));
    if (spec_.funnel_level > static_cast<int>(spec_.flow_steps)) {
      throw std::invalid_argument("model: funnel_level exceeds flow_steps");
    }
    for (std::size_t s = 0; s < spec_.flow_steps; ++s) {
      if (static_cast<int>(s) == spec_.funnel_level) {
        layers.push_back(flow_funnel(dim));
        dim -= spec_.dim_reduction;
      } else {
        flow_step(layers, dim, s);
      }
    }
    if (spec_.funnel_level == static_cast<int>(spec_.flow_steps)) layers.push_back(flow_funnel(dim));
    return layers;
  }

  void fmlp_stack(std::vector<LayerPtr>& layers, std::size_t dim, const std::vector<std::size_t>& widths) {
    const funnels::FMLPMode mode = spec_.fmlp_mode == "exact"         ? funnels::FMLPMode::exact
                                   : spec_.fmlp_mode == "lower_bound" ? funnels::FMLPMode::lower_bound
                                                                      : throw std::invalid_argument(
                                                                            "model: fmlp_mode must be 'exact' or 'lower_bound'");
    const funnels::SplineActivation act{spec_.activation_bins, spec_.activation_tail_bound};
    for (std::size_t width : widths) {
      if (width == 0 || width > dim) throw std::invalid_argument("model: F-MLP widths must be non-increasing and positive");
      layers.push_back(wrap(std::make_unique<bijections::FixedPermutation>(dim, perm_seeds_.next_u64())));
      if (width == dim) {
        layers.push_back(wrap(std::make_unique<funnels::FMLPBijection>(store_, next("fmlp_bijection"), dim, act)));
      } else {
        layers.push_back(std::make_unique<funnels::FMLPLayer>(store_, next("fmlp"), dim, width, mode, act, init_,
                                                              spec_.ansatz_hidden, spec_.ansatz_depth));
      }
      dim = width;
    }
  }

  std::size_t latent(std::size_t dim) const {
    if (spec_.latent_dim > 0) return spec_.latent_dim;
    if (spec_.dim_reduction >= dim) throw std::invalid_argument("model: dim_reduction must be smaller than the input");
    return dim - spec_.dim_reduction;
  }

  std::vector<LayerPtr> fmlp(std::size_t dim) {
    std::vector<LayerPtr> layers;
    if (spec_.actnorm) layers.push_back(wrap(std::make_unique<bijections::ActNorm>(store_, next("actnorm"), dim)));
    fmlp_stack(layers, dim, spec_.fmlp_widths.empty() ? default_fmlp_widths(dim, latent(dim)) : spec_.fmlp_widths);
    return layers;
  }

  std::vector<LayerPtr> conv(std::size_t dim) {
    if (spec_.image_shape.size() != 3) throw std::invalid_argument("model: conv_funnel needs image_shape [H, W, C]");
    std::size_t h = spec_.image_shape[0], w = spec_.image_shape[1];
    const std::size_t c = spec_.image_shape[2];
    if (h * w * c != dim) throw std::invalid_argument("model: image_shape does not match the data dimension");
    std::vector<LayerPtr> layers;
    if (spec_.actnorm) layers.push_back(wrap(std::make_unique<bijections::ActNorm>(store_, next("actnorm"), dim)));
    for (std::size_t level = 0; level < spec_.conv_levels; ++level) {
      layers.push_back(std::make_unique<funnels::ConvKxKFunnel>(store_, next("conv"), h, w, c, 2, init_,
                                                                spec_.ansatz_hidden, spec_.ansatz_depth));
      h /= 2;
      w /= 2;
    }
    const std::size_t reduced = h * w * c;
    std::vector<std::size_t> widths = spec_.fmlp_widths;
    if (widths.empty() && spec_.latent_dim > 0 && spec_.latent_dim < reduced) widths = {spec_.latent_dim};
    fmlp_stack(layers, reduced, widths);
    return layers;
  }

 private:
  static LayerPtr wrap(BijectionPtr b) { return std::make_unique<funnels::BijectionLayer>(std::move(b)); }

  const ModelSpec& spec_;
  ParamStore& store_;
  Rng init_, perm_seeds_;
  double dropout_;
  bijections::ConditionerSpec conditioner_;
  std::size_t counter_ = 0;
};

}  // namespace

ModelSpec ModelSpec::from_json(const json& j) {
  static const std::set<std::string> keys = {
      "kind", "flow_steps", "hidden_features", "residual_blocks", "bins", "tail_bound", "funnel_level",
      "dim_reduction", "inverse_density", "ansatz_hidden", "ansatz_depth", "actnorm", "lu_linear", "latent_dim",
      "fmlp_widths", "fmlp_mode", "activation_bins", "activation_tail_bound", "vae_width", "vae_depth",
      "image_shape", "conv_levels"};
  if (!j.is_object()) throw std::invalid_argument("model spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw std::invalid_argument("model spec: unknown key '" + key + "'");
  }
  ModelSpec s;
  read(j, "kind", s.kind);
  read(j, "flow_steps", s.flow_steps);
  read(j, "hidden_features", s.hidden_features);
  read(j, "residual_blocks", s.residual_blocks);
  read(j, "bins", s.bins);
  read(j, "tail_bound", s.tail_bound);
  read(j, "funnel_level", s.funnel_level);
  read(j, "dim_reduction", s.dim_reduction);
  read(j, "inverse_density", s.inverse_density);
  read(j, "ansatz_hidden", s.ansatz_hidden);
  read(j, "ansatz_depth", s.ansatz_depth);
  read(j, "actnorm", s.actnorm);
  read(j, "lu_linear", s.lu_linear);
  read(j, "latent_dim", s.latent_dim);
  read(j, "fmlp_widths", s.fmlp_widths);
  read(j, "fmlp_mode", s.fmlp_mode);
  read(j, "activation_bins", s.activation_bins);
  read(j, "activation_tail_bound", s.activation_tail_bound);
  read(j, "vae_width", s.vae_width);
  read(j, "vae_depth", s.vae_depth);
  read(j, "image_shape", s.image_shape);
  read(j, "conv_levels", s.conv_levels);
  return s;
}

json ModelSpec::to_json() const {
  return json{{"kind", kind},
              {"flow_steps", flow_steps},
              {"hidden_features", hidden_features},
              {"residual_blocks", residual_blocks},
              {"bins", bins},
              {"tail_bound", tail_bound},
              {"funnel_level", funnel_level},
              {"dim_reduction", dim_reduction},
              {"inverse_density", inverse_density},
              {"ansatz_hidden", ansatz_hidden},
              {"ansatz_depth", ansatz_depth},
              {"actnorm", actnorm},
              {"lu_linear", lu_linear},
              {"latent_dim", latent_dim},
              {"fmlp_widths", fmlp_widths},
              {"fmlp_mode", fmlp_mode},
              {"activation_bins", activation_bins},
              {"activation_tail_bound", activation_tail_bound},
              {"vae_width", vae_width},
              {"vae_depth", vae_depth},
              {"image_shape", image_shape},
              {"conv_levels", conv_levels}};
}

std::vector<std::size_t> default_fmlp_widths(std::size_t n, std::size_t latent) {
  if (latent == 0 || latent >= n) throw std::invalid_argument("model: F-MLP latent must satisfy 0 < latent < n");
  const std::size_t mid = (n + latent) / 2;
  std::vector<std::size_t> w = {n, n};
  if (mid > latent && mid < n) w.insert(w.end(), {mid, mid});
  w.insert(w.end(), {latent, latent, latent, latent});
  return w;
}

BuiltModel build_model(const ModelSpec& spec, std::size_t input_dim, std::uint64_t seed, double dropout) {
  if (input_dim == 0) throw std::invalid_argument("model: input dimension must be positive");
  BuiltModel built;
  built.spec = spec;
  built.input_dim = input_dim;
  built.seed = seed;
  built.dropout = dropout;
  built.store = std::make_unique<ParamStore>();
  Builder b(spec, *built.store, seed, dropout);
  if (spec.kind == "vae") {
    Rng init = Rng(seed).fork(11);
    const std::size_t latent = spec.latent_dim > 0 ? spec.latent_dim : b.latent(input_dim);
    built.model = std::make_unique<VAEBaseline>(*built.store, "vae", input_dim, latent, spec.vae_width, spec.vae_depth,
                                                init, dropout);
    return built;
  }
  std::vector<LayerPtr> layers;
  if (spec.kind == "identity") {
  } else if (spec.kind == "affine" || spec.kind == "nsf") {
    layers = b.flow(input_dim);
  } else if (spec.kind == "fmlp") {
    layers = b.fmlp(input_dim);
  } else if (spec.kind == "conv_funnel") {
    layers = b.conv(input_dim);
  } else {
    throw std::invalid_argument("model: unknown kind '" + spec.kind + "'");
  }
  built.model = std::make_unique<FlowModel>(input_dim, std::move(layers));
  return built;
}

}  // namespace funnel::models
