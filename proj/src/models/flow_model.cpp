#include "funnel/models/flow_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace funnel::models {

using diff::Shape;

namespace {
const double kScaleShift = std::log(std::expm1(1.0 - densities::kSigmaFloor));

densities::GaussianParams split_gaussian(const Var& out, std::size_t dim) {
  Var raw = diff::slice_cols(out, dim, 2 * dim);
  return {diff::slice_cols(out, 0, dim), diff::softplus(raw + kScaleShift) + densities::kSigmaFloor};
}
}  // namespace

Var LikelihoodParts::total() const {
  Var t = base_logprob;
  for (const Var& c : contributions) t = t + c;
  return t;
}

Tensor DensityModel::sample_latent(std::size_t n, double temperature, std::uint64_t seed) const {
  Rng rng(seed);
  return densities::StandardNormal(latent_dim()).sample(n, Var{}, rng, temperature);
}

FlowModel::FlowModel(std::size_t input_dim, std::vector<LayerPtr> layers)
    : input_dim_(input_dim),
      layers_(std::move(layers)),
      base_(layers_.empty() ? input_dim : layers_.back()->output_dim()) {
  std::size_t dim = input_dim_;
  for (const LayerPtr& layer : layers_) {
    if (layer->input_dim() != dim) {
      throw std::invalid_argument("flow model: layer '" + layer->name() + "' expects " +
                                  std::to_string(layer->input_dim()) + " features but receives " + std::to_string(dim));
    }
    dim = layer->output_dim();
  }
}

bool FlowModel::exact() const {
  for (const LayerPtr& layer : layers_) {
    if (!layer->exact()) return false;
  }
  return true;
}

LikelihoodParts FlowModel::log_prob(const Var& x, const Pass& pass) const {
  if (x.rank() != 2 || x.dim(1) != input_dim_) {
    throw std::invalid_argument("flow model: expected [batch, " + std::to_string(input_dim_) + "] input, got " +
                                diff::shape_string(x.shape()));
  }
  LikelihoodParts parts;
  Var h = x;
  for (const LayerPtr& layer : layers_) {
    funnels::LayerOutput out = layer->forward(h, pass);
    h = out.output;
    parts.contributions.push_back(out.contribution);
    parts.bound_loose = parts.bound_loose || out.bound_loose;
  }
  parts.base_logprob = base_.log_prob(h);
  return parts;
}

Tensor FlowModel::decode(const Tensor& z, Rng& rng) const {
  Tensor h = z;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) h = (*it)->inverse(h, rng);
  return h;
}

Tensor FlowModel::sample(std::size_t n, double temperature, std::uint64_t seed) const {
  Rng rng(seed);
  Tensor z = base_.sample(n, Var{}, rng, temperature);
  Rng decode_rng = rng.fork(1);
  return decode(z, decode_rng);
}

Tensor FlowModel::encode(const Tensor& x) const {
  diff::NoGradGuard guard;
  Rng rng(0);
  Pass pass{false, &rng};
  Var h = diff::constant(x);
  for (const LayerPtr& layer : layers_) h = layer->forward(h, pass).output;
  return h.value();
}

VAEBaseline::VAEBaseline(ParamStore& store, const std::string& prefix, std::size_t input_dim, std::size_t latent_dim,
                         std::size_t hidden, std::size_t depth, Rng& init, double dropout)
    : input_dim_(input_dim),
      latent_dim_(latent_dim),
      encoder_(store, prefix + ".encoder", input_dim, 2 * latent_dim, hidden, depth, nn::Activation::relu, dropout,
               init),
      decoder_(store, prefix + ".decoder", latent_dim, 2 * input_dim, hidden, depth, nn::Activation::relu, dropout,
               init) {}

densities::GaussianParams VAEBaseline::encoder(const Var& x, const Pass& pass) const {
  return split_gaussian(encoder_(x, pass), latent_dim_);
}

densities::GaussianParams VAEBaseline::decoder(const Var& z, const Pass& pass) const {
  return split_gaussian(decoder_(z, pass), input_dim_);
}

Var VAEBaseline::elbo(const Var& x, const Pass& pass) const {
  if (!pass.rng) throw std::invalid_argument("vae: the ELBO needs a random stream");
  densities::GaussianParams q = encoder(x, pass);
  Tensor eps(Shape{x.dim(0), latent_dim_});
  for (double& v : eps.values()) v = pass.rng->normal();
  Var z = q.mean + q.scale * diff::constant(std::move(eps));
  densities::GaussianParams p = decoder(z, pass);
  return densities::gaussian_log_prob(x, p.mean, p.scale) - densities::gaussian_kl(q.mean, q.scale);
}

Var VAEBaseline::objective(const Var& x, const Pass& pass) const {
  if (pass.rng) return elbo(x, pass);
  Rng rng(0);
  Pass seeded{pass.training, &rng};
  return elbo(x, seeded);
}

Tensor VAEBaseline::importance_log_likelihood(const Tensor& x, std::size_t samples, Rng& rng) const {
  if (samples == 0) throw std::invalid_argument("vae: importance sampling needs at least one sample");
  diff::NoGradGuard guard;
  const std::size_t batch = x.dim(0);
  Var xv = diff::constant(x);
  densities::GaussianParams q = encoder(xv);
  densities::StandardNormal prior(latent_dim_);
  std::vector<std::vector<double>> log_w(batch, std::vector<double>(samples));
  for (std::size_t s = 0; s < samples; ++s) {
    Tensor eps(Shape{batch, latent_dim_});
    for (double& v : eps.values()) v = rng.normal();
    Var z = q.mean + q.scale * diff::constant(std::move(eps));
    densities::GaussianParams p = decoder(z);
    const Tensor w = (densities::gaussian_log_prob(xv, p.mean, p.scale) + prior.log_prob(z) -
                      densities::gaussian_log_prob(z, q.mean, q.scale))
                         .value();
    for (std::size_t i = 0; i < batch; ++i) log_w[i][s] = w[i];
  }
  Tensor out(Shape{batch});
  for (std::size_t i = 0; i < batch; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : log_w[i]) m = std::max(m, v);
    double acc = 0.0;
    for (double v : log_w[i]) acc += std::exp(v - m);
    out[i] = m + std::log(acc / static_cast<double>(samples));
  }
  return out;
}

Tensor VAEBaseline::sample(std::size_t n, double temperature, std::uint64_t seed) const {
  diff::NoGradGuard guard;
  Tensor z = sample_latent(n, temperature, seed);
  densities::GaussianParams p = decoder(diff::constant(z));
  Rng rng = Rng(seed).fork(1);
  Tensor x(Shape{n, input_dim_});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.mean.value()[i] + p.scale.value()[i] * rng.normal();
  return x;
}

Tensor VAEBaseline::encode(const Tensor& x) const {
  diff::NoGradGuard guard;
  return encoder(diff::constant(x)).mean.value();
}

}  // namespace funnel::models
