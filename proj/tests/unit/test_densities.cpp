#include <doctest.h>

#include <numbers>

#include "funnel/bijections/coupling.hpp"
#include "funnel/densities/density.hpp"
#include "oracles.hpp"

using namespace funnel;
using namespace funnel::densities;
using diff::constant;
using diff::Shape;

namespace {

void perturb(ParamStore& store, Rng& rng, double scale) {
  for (auto& p : store.entries()) {
    for (double& v : p.var.mutable_value().values()) v += scale * rng.normal();
  }
}

/// Trapezoid integral of exp(log_prob) over [-8, 8]^dim for dim 1 or 2,
/// every row sharing the same context row.
double integrate(const ConditionalDensity& d, const Tensor& ctx_row = {}, std::size_t points = 401) {
  std::vector<double> w;
  const std::vector<double> nodes = oracle::trapezoid_nodes(-8.0, 8.0, points, w);
  const std::size_t rows = d.dim() == 1 ? points : points * points;
  Tensor x(Shape{rows, d.dim()});
  std::vector<double> weight(rows);
  for (std::size_t i = 0; i < points; ++i) {
    if (d.dim() == 1) {
      x[i] = nodes[i];
      weight[i] = w[i];
      continue;
    }
    for (std::size_t j = 0; j < points; ++j) {
      x.at(i * points + j, 0) = nodes[i];
      x.at(i * points + j, 1) = nodes[j];
      weight[i * points + j] = w[i] * w[j];
    }
  }
  Var ctx;
  if (d.context_dim() > 0) {
    Tensor c(Shape{rows, d.context_dim()});
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < d.context_dim(); ++k) c.at(r, k) = ctx_row[k];
    }
    ctx = constant(c);
  }
  diff::NoGradGuard guard;
  const Tensor lp = d.log_prob(constant(x), ctx, {}).value();
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) total += weight[r] * std::exp(lp[r]);
  return total;
}

std::vector<double> column(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST_CASE("standard normal log density") {
  StandardNormal n1(1);
  CHECK(n1.log_prob(constant(Tensor::from_rows({{0.0}}))).item() == doctest::Approx(-0.918939).epsilon(1e-6));
  StandardNormal n3(3);
  CHECK(n3.log_prob(constant(Tensor(Shape{1, 3}))).item() ==
        doctest::Approx(-1.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK_THROWS_AS(n3.log_prob(constant(Tensor(Shape{1, 2}))), std::invalid_argument);
}

TEST_CASE("diagonal Gaussian ansatz starts at the standard normal") {
  ParamStore store;
  Rng init(1);
  DiagGaussianAnsatz free(store, "f", 1, 0, 8, 1, init);
  CHECK(free.log_prob(constant(Tensor::from_rows({{0.5}}))).item() == doctest::Approx(-1.043939).epsilon(1e-6));
  CHECK(free.log_prob(constant(Tensor::from_rows({{0.5}}))).item() ==
        doctest::Approx(oracle::normal_logpdf(0.5)).epsilon(1e-14));

  DiagGaussianAnsatz cond(store, "c", 2, 3, 8, 2, init);
  const GaussianParams p = cond.params(constant(Tensor::from_rows({{1.0, -2.0, 0.5}})), 1, {});
  for (double v : p.mean.value().values()) CHECK(v == 0.0);
  for (double v : p.scale.value().values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("conditional flow with identity layers equals the standard normal") {
  ParamStore store;
  Rng init(2), rng(3);
  std::vector<bijections::BijectionPtr> steps;
  steps.push_back(std::make_unique<bijections::SplineCoupling>(store, "s", bijections::half_mask(2, true), 2, 6, 3.0,
                                                               bijections::ConditionerSpec{8, 1}, init));
  ConditionalFlowDensity flow(2, 2, std::move(steps));
  StandardNormal base(2);
  Tensor x(Shape{20, 2}), c(Shape{20, 2});
  for (double& v : x.values()) v = rng.normal();
  for (double& v : c.values()) v = rng.normal();
  CHECK(flow.log_prob(constant(x), constant(c), {}).value() == base.log_prob(constant(x)).value());
}

TEST_CASE("temperature sampling") {
  StandardNormal n(1);
  Rng rng(4);
  for (double t : {1.0, 0.5}) {
    const double var = oracle::variance(column(n.sample(100000, {}, rng, t)));
    CHECK(var == doctest::Approx(t * t).epsilon(0.05));
  }
  CHECK_THROWS_AS(n.sample(10, {}, rng, 0.0), std::domain_error);
  CHECK_THROWS_AS(n.sample(10, {}, rng, -1.0), std::domain_error);
  for (double v : n.sample(1000, {}, rng, 1e-6).values()) CHECK(std::abs(v) < 1e-4);
}

TEST_CASE("Gaussian KL") {
  CHECK(gaussian_kl(Tensor::vector({0.0, 0.0}), Tensor::vector({1.0, 1.0})) == 0.0);
  CHECK(gaussian_kl(Tensor::vector({1.0}), Tensor::vector({1.0})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(gaussian_kl(Tensor::vector({0.0}), Tensor::vector({0.0})), std::domain_error);
  CHECK_THROWS_AS(gaussian_kl(Tensor::vector({0.0}), Tensor::vector({-1.0})), std::domain_error);

  // Monte-Carlo KL(q || p) = E_q[log q - log p].
  const double mu = 0.3, sigma = 0.8;
  double mc = 0.0;
  const auto draws = oracle::normal_draws(100000, 11, mu, sigma);
  for (double z : draws) mc += oracle::normal_logpdf(z, mu, sigma) - oracle::normal_logpdf(z);
  mc /= static_cast<double>(draws.size());
  CHECK(gaussian_kl(Tensor::vector({mu}), Tensor::vector({sigma})) == doctest::Approx(mc).epsilon(0.01));

  const Var rowwise = gaussian_kl(constant(Tensor::from_rows({{mu, 1.0}, {0.0, 0.0}})),
                                  constant(Tensor::from_rows({{sigma, 1.0}, {1.0, 2.0}})));
  CHECK(rowwise.value()[0] == doctest::Approx(0.5 * (mu * mu + sigma * sigma - 1 - 2 * std::log(sigma)) + 0.5));
  CHECK(rowwise.value()[1] == doctest::Approx(0.5 * (4.0 - 1.0 - 2.0 * std::log(2.0))));
}

TEST_CASE("every density type integrates to one") {
  Rng init(5), rng(6);
  CHECK(integrate(StandardNormal(1)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(integrate(StandardNormal(2)) == doctest::Approx(1.0).epsilon(1e-3));

  ParamStore store;
  DiagGaussianAnsatz free(store, "f", 2, 0, 8, 1, init);
  DiagGaussianAnsatz cond(store, "c", 2, 1, 8, 2, init);
  std::vector<bijections::BijectionPtr> steps;
  steps.push_back(std::make_unique<bijections::SplineCoupling>(store, "s0", bijections::half_mask(2, true), 1, 6, 3.0,
                                                               bijections::ConditionerSpec{8, 1}, init));
  steps.push_back(std::make_unique<bijections::AffineCoupling>(store, "s1", bijections::half_mask(2, false), 1,
                                                               bijections::ConditionerSpec{8, 1}, init));
  ConditionalFlowDensity flow(2, 1, std::move(steps));
  perturb(store, rng, 0.2);
  const Tensor ctx = Tensor::vector({0.7});
  CHECK(integrate(free) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(integrate(cond, ctx) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(integrate(flow, ctx, 801) == doctest::Approx(1.0).epsilon(1e-3));
  auto fixed = FixedGaussian::constant(1, 0.4, 0.6);
  CHECK(integrate(*fixed) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("ansatz scale never drops below the floor") {
  ParamStore store;
  Rng init(7);
  DiagGaussianAnsatz a(store, "a", 3, 0, 8, 1, init);
  store.assign("a.raw_scale", Tensor(Shape{1, 3}, -1e6));
  const GaussianParams p = a.params({}, 2, {});
  for (double s : p.scale.value().values()) CHECK(s >= kSigmaFloor);
  const double cap = 3.0 * -std::log(kSigmaFloor * std::sqrt(2.0 * std::numbers::pi));
  const double lp = a.log_prob(constant(Tensor(Shape{1, 3}))).item();
  CHECK(lp <= cap + 1e-9);
  CHECK(lp == doctest::Approx(cap).epsilon(1e-9));
}

TEST_CASE("conditional samples follow the context") {
  ParamStore store;
  Rng rng(8);
  auto shifted = std::make_unique<FixedGaussian>(1, 1, [](const Var& ctx, std::size_t) {
    return GaussianParams{ctx, constant(Tensor(ctx.shape(), 0.5))};
  });
  Tensor c(Shape{20000, 1}, 3.0);
  const Tensor s = shifted->sample(20000, constant(c), rng, 1.0);
  CHECK(oracle::mean(column(s)) == doctest::Approx(3.0).epsilon(0.01));
  CHECK(oracle::variance(column(s)) == doctest::Approx(0.25).epsilon(0.05));
  CHECK_THROWS(shifted->sample(5, constant(c), rng, 1.0));
}
