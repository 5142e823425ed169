#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "funnel/bijections/linear.hpp"
#include "funnel/models/checkpoint.hpp"
#include "oracles.hpp"

using namespace funnel;
using namespace funnel::models;
using diff::constant;
using diff::Shape;
using nlohmann::json;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = scale * rng.normal();
  return t;
}

void perturb(ParamStore& store, Rng& rng, double scale) {
  for (auto& p : store.entries()) {
    if (!p.trainable) continue;
    for (double& v : p.var.mutable_value().values()) v += scale * rng.normal();
  }
}

double sup_diff(const Tensor& a, const Tensor& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

/// Raw network output giving scale sigma under softplus(raw + shift) + floor.
double raw_for_scale(double sigma) {
  const double shift = std::log(std::expm1(1.0 - densities::kSigmaFloor));
  return std::log(std::expm1(sigma - densities::kSigmaFloor)) - shift;
}

ModelSpec spec_from(const json& j) { return ModelSpec::from_json(j); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("funnel_models_" + name);
}

}  // namespace

TEST_CASE("identity model") {
  FlowModel m(3, {});
  CHECK(m.latent_dim() == 3);
  CHECK(m.exact());
  Rng rng(1);
  const Tensor x = random_tensor({20, 3}, rng);
  const LikelihoodParts parts = m.log_prob(constant(x));
  CHECK(parts.contributions.empty());
  for (std::size_t r = 0; r < 20; ++r) {
    double expected = 0.0;
    for (std::size_t c = 0; c < 3; ++c) expected += oracle::normal_logpdf(x.at(r, c));
    CHECK(parts.total().value()[r] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(m.encode(x) == x);

  const Tensor s = m.sample(40000, 1.0, 2);
  std::vector<double> col(s.values().begin(), s.values().end());
  CHECK(std::abs(oracle::mean(col)) < 0.02);
  CHECK(oracle::variance(col) == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(m.log_prob(constant(Tensor(Shape{2, 4}))), std::invalid_argument);
}

TEST_CASE("layer dimensions must chain") {
  std::vector<LayerPtr> layers;
  layers.push_back(std::make_unique<funnels::BijectionLayer>(std::make_unique<bijections::FixedPermutation>(3, 1)));
  CHECK_THROWS_AS(FlowModel(2, std::move(layers)), std::invalid_argument);
}

TEST_CASE("model with one exact funnel integrates to one") {
  BuiltModel built = build_model(spec_from({{"kind", "nsf"}, {"flow_steps", 2}, {"funnel_level", 1},
                                            {"dim_reduction", 1}, {"hidden_features", 8}, {"ansatz_hidden", 8}}),
                                 2, 3);
  Rng rng(4);
  perturb(*built.store, rng, 0.2);
  auto& model = dynamic_cast<FlowModel&>(*built.model);
  CHECK(model.exact());
  CHECK(model.latent_dim() == 1);

  const std::size_t points = 801;
  std::vector<double> w;
  const auto nodes = oracle::trapezoid_nodes(-10.0, 10.0, points, w);
  Tensor x(Shape{points * points, 2});
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      x.at(i * points + j, 0) = nodes[i];
      x.at(i * points + j, 1) = nodes[j];
    }
  }
  diff::NoGradGuard guard;
  const Tensor lp = model.log_prob(constant(x)).total().value();
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) total += w[i] * w[j] * std::exp(lp[i * points + j]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sampling, encoding and temperature") {
  const std::vector<std::pair<json, std::size_t>> cases = {
      {{{"kind", "nsf"}, {"flow_steps", 3}, {"funnel_level", 1}, {"dim_reduction", 2}, {"hidden_features", 8},
        {"ansatz_hidden", 8}},
       5},
      {{{"kind", "affine"}, {"flow_steps", 2}, {"funnel_level", 2}, {"dim_reduction", 1}, {"hidden_features", 8},
        {"inverse_density", "flow"}},
       4},
      {{{"kind", "fmlp"}, {"latent_dim", 2}, {"activation_bins", 6}, {"ansatz_hidden", 8}}, 6},
      {{{"kind", "conv_funnel"}, {"image_shape", {4, 4, 1}}, {"latent_dim", 2}, {"ansatz_hidden", 8}}, 16},
  };
  std::uint64_t seed = 10;
  for (const auto& [j, dim] : cases) {
    CAPTURE(j.dump());
    BuiltModel built = build_model(spec_from(j), dim, seed++);
    Rng rng(seed);
    perturb(*built.store, rng, 0.1);
    const DensityModel& m = *built.model;
    CHECK(m.exact());
    const Tensor x = m.sample(500, 1.0, seed);
    CHECK(x.shape() == Shape{500, dim});
    const Tensor z = m.encode(x);
    CHECK(sup_diff(z, m.sample_latent(500, 1.0, seed)) < 1e-7);
    CHECK(m.encode(x) == z);
  }

  BuiltModel built = build_model(spec_from(cases[0].first), 5, 20);
  Rng rng(21);
  perturb(*built.store, rng, 0.1);
  const Tensor z = built.model->encode(built.model->sample(20000, 0.7, 22));
  std::vector<double> v(z.values().begin(), z.values().end());
  CHECK(oracle::variance(v) == doctest::Approx(0.49).epsilon(0.05));
}

TEST_CASE("inserting a permutation leaves the log-likelihood unchanged") {
  auto make = [](bool with_perm) {
    auto store_ptr = std::make_unique<ParamStore>();
    std::vector<LayerPtr> layers;
    layers.push_back(std::make_unique<funnels::BijectionLayer>(
        std::make_unique<bijections::LULinear>(*store_ptr, "a", 3)));
    if (with_perm) {
      layers.push_back(
          std::make_unique<funnels::BijectionLayer>(std::make_unique<bijections::FixedPermutation>(3, 31)));
    }
    Rng noise(32);
    perturb(*store_ptr, noise, 0.5);
    return std::make_pair(std::move(store_ptr), FlowModel(3, std::move(layers)));
  };
  auto [s1, plain] = make(false);
  auto [s2, permuted] = make(true);
  Rng rng(33);
  const Tensor x = random_tensor({200, 3}, rng);
  const Tensor a = plain.log_prob(constant(x)).total().value();
  const Tensor b = permuted.log_prob(constant(x)).total().value();
  CHECK(sup_diff(a, b) < 1e-13);
  const LikelihoodParts parts = permuted.log_prob(constant(x));
  for (double v : parts.contributions[1].value().values()) CHECK(v == 0.0);
}

TEST_CASE("VAE on a linear-Gaussian instance") {
  // p(z) = N(0, 1), p(x|z) = N(z, 1) so p(x) = N(0, 2) and p(z|x) = N(x/2, 1/2).
  ParamStore store;
  Rng init(40);
  VAEBaseline vae(store, "v", 1, 1, 4, 0, init);
  auto set_encoder = [&](double gain, double sigma) {
    store.assign("v.encoder.l0.weight", Tensor::from_rows({{gain, 0.0}}));
    store.assign("v.encoder.l0.bias", Tensor::vector({0.0, raw_for_scale(sigma)}));
  };
  store.assign("v.decoder.l0.weight", Tensor::from_rows({{1.0, 0.0}}));
  store.assign("v.decoder.l0.bias", Tensor::vector({0.0, raw_for_scale(1.0)}));
  set_encoder(0.5, std::sqrt(0.5));

  Rng rng(41);
  const Tensor x = random_tensor({200, 1}, rng, 1.5);
  Rng replay = rng;
  const Tensor elbo = vae.elbo(constant(x), {false, &rng}).value();
  // KL(N(x/2, 1/2) || N(0, 1)) and the single-sample reconstruction term.
  const double kl = 0.5 * (0.5 - 1.0 - std::log(0.5));
  for (std::size_t i = 0; i < 200; ++i) {
    const double z = 0.5 * x[i] + std::sqrt(0.5) * replay.normal();
    CHECK(elbo[i] == doctest::Approx(oracle::normal_logpdf(x[i] - z) - kl - 0.125 * x[i] * x[i]).epsilon(1e-12));
  }
  // Its expectation is log p(x) exactly.
  for (const double x0 : {-2.0, 0.0, 0.7, 3.0}) {
    const Tensor reps = vae.elbo(constant(Tensor(Shape{40000, 1}, x0)), {false, &rng}).value();
    std::vector<double> r(reps.values().begin(), reps.values().end());
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * (0.25 * x0 * x0 + 0.5) - kl -
                            0.125 * x0 * x0;
    CHECK(expected == doctest::Approx(oracle::normal_logpdf(x0, 0.0, std::sqrt(2.0))).epsilon(1e-14));
    CHECK(std::abs(oracle::mean(r) - expected) < 4.0 * std::sqrt(oracle::variance(r) / 40000.0));
  }

  CHECK(densities::gaussian_kl(constant(Tensor::from_rows({{0.0}})), constant(Tensor::from_rows({{1.0}}))).item() ==
        0.0);

  // A mismatched encoder: the ELBO averages below log p(x), the importance estimate recovers it.
  set_encoder(0.3, 0.9);
  const double x0 = 1.2;
  const Tensor xs(Shape{10000, 1}, x0);
  const Tensor bound = vae.elbo(constant(xs), {false, &rng}).value();
  std::vector<double> b(bound.values().begin(), bound.values().end());
  const double truth = oracle::normal_logpdf(x0, 0.0, std::sqrt(2.0));
  const double mc_error = 3.0 * std::sqrt(oracle::variance(b) / 1e4);
  CHECK(oracle::mean(b) <= truth + mc_error);
  CHECK(oracle::mean(b) < truth);
  const Tensor is = vae.importance_log_likelihood(Tensor::from_rows({{x0}}), 10000, rng);
  CHECK(is.item() == doctest::Approx(truth).epsilon(5e-3));
  CHECK(oracle::mean(b) <= is.item() + mc_error);
  CHECK_FALSE(vae.exact());
  CHECK_THROWS_AS(vae.elbo(constant(xs), {}), std::invalid_argument);
}

TEST_CASE("model spec parsing and building") {
  CHECK_THROWS_WITH_AS(spec_from({{"kind", "nsf"}, {"flow_step", 3}}), doctest::Contains("flow_step"),
                       std::invalid_argument);
  CHECK_THROWS_AS(build_model(spec_from({{"kind", "glow"}}), 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_model(spec_from({{"kind", "nsf"}, {"funnel_level", 9}, {"dim_reduction", 1}}), 4, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_model(spec_from({{"kind", "conv_funnel"}, {"image_shape", {3, 3, 1}}}), 16, 0),
                  std::invalid_argument);

  const ModelSpec spec = spec_from({{"kind", "fmlp"}, {"latent_dim", 3}, {"fmlp_mode", "lower_bound"}});
  CHECK(ModelSpec::from_json(spec.to_json()).to_json() == spec.to_json());
  BuiltModel a = build_model(spec, 8, 5), b = build_model(spec, 8, 5), c = build_model(spec, 8, 6);
  CHECK_FALSE(a.model->exact());
  CHECK(a.model->latent_dim() == 3);
  CHECK(a.store->snapshot() == b.store->snapshot());
  CHECK(a.store->snapshot() != c.store->snapshot());

  CHECK(default_fmlp_widths(8, 2) == std::vector<std::size_t>{8, 8, 5, 5, 2, 2, 2, 2});
  CHECK_THROWS_AS(default_fmlp_widths(4, 4), std::invalid_argument);
}

TEST_CASE("checkpoint round trip is bit-exact") {
  const ModelSpec spec = spec_from({{"kind", "nsf"}, {"flow_steps", 3}, {"funnel_level", 1}, {"dim_reduction", 1},
                                    {"hidden_features", 8}, {"actnorm", true}, {"ansatz_hidden", 8}});
  BuiltModel built = build_model(spec, 4, 50);
  Rng rng(51);
  const Tensor x = random_tensor({64, 4}, rng);
  built.model->objective(constant(x), {true, &rng});  // initializes actnorm
  perturb(*built.store, rng, 0.3);
  data::Standardization standardization{{0.1, 0.2, 0.3, 0.4}, {1.5, 2.5, 3.5, 4.5}};
  const auto path = temp_path("round_trip.ckpt");
  save_checkpoint(path, make_checkpoint(built, standardization, {{"dataset", "demo"}}));

  const Checkpoint ck = read_checkpoint(path);
  CHECK(ck.info.at("dataset") == "demo");
  CHECK(ck.standardization.mean == standardization.mean);
  CHECK(ck.standardization.scale == standardization.scale);
  BuiltModel loaded = load_model(ck);
  CHECK(loaded.store->snapshot() == built.store->snapshot());
  diff::NoGradGuard guard;
  CHECK(loaded.model->objective(constant(x), {}).value() == built.model->objective(constant(x), {}).value());

  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT and some more bytes";
  }
  CHECK_THROWS_AS(read_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
}
