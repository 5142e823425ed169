#include <doctest.h>

#include <numbers>

#include "funnel/bijections/coupling.hpp"
#include "funnel/bijections/linear.hpp"
#include "funnel/funnels/conv.hpp"
#include "funnel/funnels/fmlp.hpp"
#include "funnel/funnels/funnel.hpp"
#include "oracles.hpp"

using namespace funnel;
using namespace funnel::funnels;
using densities::FixedGaussian;
using densities::GaussianParams;
using diff::constant;
using diff::ParamStore;
using diff::Shape;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

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

/// Standard normal N(0, 1) over `dim` features that ignores its `ctx` context.
std::unique_ptr<FixedGaussian> unit_normal(std::size_t dim, std::size_t ctx) {
  return FixedGaussian::constant(dim, 0.0, 1.0, ctx);
}

/// Trapezoid integral over [-8, 8]^2 of exp(log N(z) + V) for a 2 -> 1 layer.
double integrate_2d(const Layer& layer, std::size_t points = 641) {
  std::vector<double> w;
  const auto nodes = oracle::trapezoid_nodes(-8.0, 8.0, points, w);
  Tensor x(Shape{points * points, 2});
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      x.at(i * points + j, 0) = nodes[i];
      x.at(i * points + j, 1) = nodes[j];
    }
  }
  diff::NoGradGuard guard;
  const LayerOutput out = layer.forward(constant(x), {});
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      const std::size_t r = i * points + j;
      double lp = out.contribution.value()[r];
      for (std::size_t k = 0; k < out.output.dim(1); ++k) lp += oracle::normal_logpdf(out.output.value().at(r, k));
      total += w[i] * w[j] * std::exp(lp);
    }
  }
  return total;
}

void check_right_inverse(const Layer& layer, Rng& rng, double tol, std::size_t count = 1000, double scale = 1.0) {
  const Tensor z = random_tensor({count, layer.output_dim()}, rng, scale);
  const Tensor x = layer.inverse(z, rng);
  diff::NoGradGuard guard;
  CHECK(sup_diff(layer.forward(constant(x), {}).output.value(), z) < tol);
}

}  // namespace

TEST_CASE("funnel with identity F and standard-normal reconstruction") {
  FunnelLayer f(PartitionSpec::leading(2, 1), std::make_unique<bijections::Identity>(1), unit_normal(1, 1));
  const LayerOutput out = f.forward(constant(Tensor::from_rows({{0.0, 0.0}})), {});
  CHECK(out.output.item() == 0.0);
  CHECK(out.contribution.item() == doctest::Approx(-0.918939).epsilon(1e-6));
  CHECK_FALSE(out.bound_loose);
}

TEST_CASE("funnel with a fixed linear F") {
  ParamStore store;
  auto lu = std::make_unique<bijections::LULinear>(store, "r", 1);
  store.assign("r.log_diag", Tensor::vector({std::log(3.0)}));
  FunnelLayer f(PartitionSpec::leading(2, 1), std::move(lu), unit_normal(1, 1));
  const LayerOutput out = f.forward(constant(Tensor::from_rows({{0.5, 1.0}})), {});
  CHECK(out.output.item() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(out.contribution.item() == doctest::Approx(-1.043939 + std::log(3.0)).epsilon(1e-6));
  CHECK(out.contribution.item() == doctest::Approx(0.054673).epsilon(1e-5));
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(PartitionSpec::leading(2, 2), std::invalid_argument);
  PartitionSpec bad{3, {0, 1}, {1}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  PartitionSpec gap{3, {0}, {2}};
  CHECK_THROWS_AS(gap.validate(), std::invalid_argument);
  PartitionSpec custom{3, {2, 0}, {1}};
  const Tensor x = assemble(Tensor::from_rows({{7.0, 5.0}}), Tensor::from_rows({{6.0}}), custom);
  CHECK(x == Tensor::from_rows({{5.0, 6.0, 7.0}}));
}

TEST_CASE("conditioned funnel integrates to one and satisfies the right inverse") {
  ParamStore store;
  Rng init(1), rng(2);
  std::vector<bijections::BijectionPtr> steps;
  steps.push_back(std::make_unique<bijections::SplineCoupling>(store, "f", std::vector<bool>{true}, 1, 6, 4.0,
                                                               bijections::ConditionerSpec{8, 1}, init));
  auto F = std::make_unique<bijections::Chain>(1, 1, std::move(steps));
  auto p = std::make_unique<densities::DiagGaussianAnsatz>(store, "p", 1, 1, 8, 2, init);
  perturb(store, rng, 0.3);
  FunnelLayer f(PartitionSpec::leading(2, 1), std::move(F), std::move(p));
  CHECK(integrate_2d(f) == doctest::Approx(1.0).epsilon(1e-3));
  check_right_inverse(f, rng, 1e-8);
}

TEST_CASE("funnel inverse") {
  Rng rng(3);
  FunnelLayer id(PartitionSpec::leading(3, 1), std::make_unique<bijections::Identity>(2), unit_normal(1, 2));
  const Tensor z = random_tensor({50, 2}, rng);
  const Tensor x = id.inverse(z, rng);
  for (std::size_t r = 0; r < 50; ++r) {
    CHECK(x.at(r, 1) == z.at(r, 0));
    CHECK(x.at(r, 2) == z.at(r, 1));
  }

  // Reconstruction pinned to mu(z) = 2 z at the scale floor.
  auto pinned = std::make_unique<FixedGaussian>(1, 1, [](const Var& ctx, std::size_t) {
    return GaussianParams{ctx * 2.0, constant(Tensor(ctx.shape(), densities::kSigmaFloor))};
  });
  FunnelLayer det(PartitionSpec::leading(2, 1), std::make_unique<bijections::Identity>(1), std::move(pinned));
  Rng r1(10), r2(20);
  const Tensor zz = random_tensor({200, 1}, rng);
  const Tensor a = det.inverse(zz, r1), b = det.inverse(zz, r2);
  for (std::size_t r = 0; r < 200; ++r) {
    CHECK(a.at(r, 1) == b.at(r, 1));
    CHECK(std::abs(a.at(r, 0) - 2.0 * zz[r]) < 6.0 * densities::kSigmaFloor);
  }
}

TEST_CASE("non-finite log-determinant is reported") {
  ParamStore store;
  auto lu = std::make_unique<bijections::LULinear>(store, "r", 1);
  store.assign("r.log_diag", Tensor::vector({std::numeric_limits<double>::infinity()}));
  FunnelLayer f(PartitionSpec::leading(2, 1), std::move(lu), unit_normal(1, 1));
  CHECK_THROWS_WITH_AS(f.forward(constant(Tensor::from_rows({{0.1, 0.2}})), {}), doctest::Contains("funnel"),
                       std::domain_error);
}

TEST_CASE("slice contribution") {
  Rng rng(4);
  auto make = [](ParamStore& store) {
    Rng init(5), noise(6);
    auto p = std::make_unique<densities::DiagGaussianAnsatz>(store, "p", 2, 3, 8, 2, init);
    perturb(store, noise, 0.4);
    return p;
  };
  ParamStore s1, s2;
  auto p_layer = make(s1);
  auto p_slice = make(s2);
  const PartitionSpec part{5, {0, 3}, {1, 2, 4}};
  FunnelLayer f(part, std::make_unique<bijections::Identity>(3), std::move(p_layer));
  const Tensor x = random_tensor({1000, 5}, rng);
  const LayerOutput a = f.forward(constant(x), {});
  const LayerOutput b = slice_contribution(constant(x), part, p_slice.get());
  CHECK(a.output.value() == b.output.value());
  CHECK(a.contribution.value() == b.contribution.value());

  const LayerOutput pass = slice_contribution(constant(x), PartitionSpec::leading(5, 0), nullptr);
  CHECK(pass.output.value() == x);
  for (double v : pass.contribution.value().values()) CHECK(v == 0.0);

  auto perfect = std::make_unique<FixedGaussian>(1, 1, [](const Var& ctx, std::size_t) {
    return GaussianParams{ctx, constant(Tensor(ctx.shape(), densities::kSigmaFloor))};
  });
  const LayerOutput best =
      slice_contribution(constant(Tensor::from_rows({{0.7, 0.7}})), PartitionSpec::leading(2, 1), perfect.get());
  CHECK(best.contribution.item() == doctest::Approx(-std::log(densities::kSigmaFloor) - kHalfLog2Pi).epsilon(1e-14));
}

TEST_CASE("conv1d stride 2: kernels, contribution and inverse") {
  ParamStore store;
  Conv1DFunnel c(store, "c", 4, Conv1DMode::stride2, unit_normal(2, 2));
  c.set_kernel(1.0, 0.0);
  const Tensor x = Tensor::from_rows({{1, 2, 3, 4}});
  LayerOutput out = c.forward(constant(x), {});
  CHECK(out.output.value() == Tensor::from_rows({{1, 3}}));
  CHECK(c.log_jacobian() == 0.0);
  CHECK(out.contribution.item() == doctest::Approx(oracle::normal_logpdf(2) + oracle::normal_logpdf(4)));

  c.set_kernel(2.0, 1.0);
  out = c.forward(constant(x), {});
  CHECK(out.output.value() == Tensor::from_rows({{4, 10}}));
  CHECK(c.log_jacobian() == doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(out.contribution.item() ==
        doctest::Approx(oracle::normal_logpdf(2) + oracle::normal_logpdf(4) + 2.0 * std::log(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(Conv1DFunnel(store, "odd", 5, Conv1DMode::stride2, unit_normal(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(c.set_kernel(0.0, 1.0), std::domain_error);

  // x_2' pinned at 2: x_1 = (4 - 1 * 2) / 2.
  ParamStore s2;
  Conv1DFunnel pinned(s2, "p", 2, Conv1DMode::stride2, FixedGaussian::constant(1, 2.0, 1e-300, 1));
  pinned.set_kernel(2.0, 1.0);
  Rng rng(7);
  const Tensor xi = pinned.inverse(Tensor::from_rows({{4.0}}), rng);
  CHECK(xi.at(0, 1) == 2.0);
  CHECK(xi.at(0, 0) == 1.0);

  ParamStore s3;
  Conv1DFunnel decoupled(s3, "d", 2, Conv1DMode::stride2, unit_normal(1, 1));
  decoupled.set_kernel(-4.0, 0.0);
  const Tensor xd = decoupled.inverse(Tensor::from_rows({{3.0}, {-1.0}}), rng);
  CHECK(xd.at(0, 0) == 3.0 / -4.0);
  CHECK(xd.at(1, 0) == -1.0 / -4.0);
}

TEST_CASE("conv1d stride 2 with a trained-looking ansatz: normalization, right inverse, additivity") {
  ParamStore store;
  Rng init(8), rng(9);
  Conv1DFunnel c2(store, "c2", 2, Conv1DMode::stride2, init, 8, 2);
  perturb(store, rng, 0.3);
  c2.set_kernel(1.3, -0.6);
  CHECK(integrate_2d(c2) == doctest::Approx(1.0).epsilon(1e-3));

  Conv1DFunnel c8(store, "c8", 8, Conv1DMode::stride2, init, 8, 2);
  perturb(store, rng, 0.3);
  c8.set_kernel(-0.7, 0.4);
  check_right_inverse(c8, rng, 1e-8);

  Conv1DFunnel c4(store, "c4", 4, Conv1DMode::stride2, unit_normal(2, 2));
  Conv1DFunnel c16(store, "c16", 8, Conv1DMode::stride2, unit_normal(4, 4));
  c4.set_kernel(2.5, 1.0);
  c16.set_kernel(2.5, 1.0);
  CHECK(c16.log_jacobian() == doctest::Approx(2.0 * c4.log_jacobian()).epsilon(1e-15));
}

TEST_CASE("conv1d stride 1 recursion") {
  const std::vector<double> z{0.5, -1.5, 2.0};
  CHECK(Conv1DFunnel::stride1_recover(1.0, 0.0, z, 9.0) == std::vector<double>{0.5, -1.5, 2.0, 9.0});
  CHECK(Conv1DFunnel::stride1_recover(2.0, 1.0, {5.0, 7.0}, 1.0) == std::vector<double>{1.0, 3.0, 1.0});

  Rng rng(10);
  const double a = 1.0 + rng.uniform(), b = rng.normal() * 0.8;
  std::vector<double> zr(63);
  for (double& v : zr) v = rng.normal();
  const std::vector<double> x = Conv1DFunnel::stride1_recover(a, b, zr, rng.normal());
  double worst = 0.0;
  for (std::size_t i = 0; i < zr.size(); ++i) worst = std::max(worst, std::abs(a * x[i] + b * x[i + 1] - zr[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("conv1d stride 1 modes") {
  ParamStore store;
  Rng init(11), rng(12);
  Conv1DFunnel exact(store, "e", 6, Conv1DMode::stride1_exact, init, 8, 2);
  perturb(store, rng, 0.2);
  exact.set_kernel(1.4, 0.5);
  CHECK(exact.exact());
  check_right_inverse(exact, rng, 1e-8);
  CHECK(exact.log_jacobian() == doctest::Approx(5.0 * std::log(1.4)).epsilon(1e-14));

  ParamStore s2;
  Conv1DFunnel two(s2, "t", 2, Conv1DMode::stride1_exact, init, 8, 2);
  perturb(s2, rng, 0.2);
  two.set_kernel(0.8, 0.3);
  CHECK(integrate_2d(two) == doctest::Approx(1.0).epsilon(1e-3));

  Conv1DFunnel chained(store, "ch", 5, Conv1DMode::stride1_chained, unit_normal(1, 1));
  chained.set_kernel(2.0, 1.0);
  CHECK_FALSE(chained.exact());
  const Tensor x = Tensor::from_rows({{0.1, -0.2, 0.3, 0.4, -0.5}});
  const LayerOutput out = chained.forward(constant(x), {});
  CHECK(out.bound_loose);
  double expected = 4.0 * std::log(2.0);
  for (double v : x.values()) expected += oracle::normal_logpdf(v);
  CHECK(out.contribution.item() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("k x k conv: selector kernel") {
  ParamStore store;
  ConvKxKFunnel c(store, "k", 4, 4, 1, 2, unit_normal(3, 9));
  Rng rng(13);
  const Tensor x = random_tensor({3, 16}, rng);
  const LayerOutput out = c.forward(constant(x), {});
  CHECK(c.log_abs_det_jacobian() == 0.0);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t ti = 0; ti < 2; ++ti) {
      for (std::size_t tj = 0; tj < 2; ++tj) {
        CHECK(out.output.value().at(r, ti * 2 + tj) == x.at(r, (2 * ti + 1) * 4 + 2 * tj + 1));
      }
    }
  }
  const Tensor z = random_tensor({2, 4}, rng);
  const Tensor xi = c.inverse(z, rng);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t t = 0; t < 4; ++t) CHECK(xi.at(r, (2 * (t / 2) + 1) * 4 + 2 * (t % 2) + 1) == z.at(r, t));
  }
}

TEST_CASE("k x k conv: Jacobian block and contribution") {
  ParamStore store;
  Rng rng(14);
  ConvKxKFunnel c3(store, "c3", 4, 4, 3, 2, unit_normal(9, 27));
  perturb(store, rng, 0.5);
  const Tensor J = c3.jacobian();
  const Tensor& K = c3.kernel().value();
  for (std::size_t co = 0; co < 3; ++co) {
    for (std::size_t ci = 0; ci < 3; ++ci) CHECK(J.at(co, ci) == K.at(co, 3 * 3 + ci));
  }
  const double det = J.at(0, 0) * (J.at(1, 1) * J.at(2, 2) - J.at(1, 2) * J.at(2, 1)) -
                     J.at(0, 1) * (J.at(1, 0) * J.at(2, 2) - J.at(1, 2) * J.at(2, 0)) +
                     J.at(0, 2) * (J.at(1, 0) * J.at(2, 1) - J.at(1, 1) * J.at(2, 0));
  CHECK(c3.log_abs_det_jacobian() == doctest::Approx(std::log(std::abs(det))).epsilon(1e-12));

  ParamStore s1;
  ConvKxKFunnel c1(s1, "c1", 4, 4, 1, 2, unit_normal(3, 9));
  Tensor kernel(Shape{1, 4});
  for (double& v : kernel.values()) v = rng.normal();
  kernel[3] = -2.0;
  s1.assign("c1.kernel", kernel);
  const Tensor x = random_tensor({1, 16}, rng);
  const LayerOutput out = c1.forward(constant(x), {});
  double recon = 0.0;
  for (std::size_t h = 0; h < 4; ++h) {
    for (std::size_t w = 0; w < 4; ++w) {
      if (h % 2 == 1 && w % 2 == 1) continue;
      recon += oracle::normal_logpdf(x[h * 4 + w]);
    }
  }
  CHECK(out.contribution.item() - recon == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));

  kernel[3] = 0.0;
  s1.assign("c1.kernel", kernel);
  CHECK_THROWS_AS(c1.forward(constant(x), {}), std::domain_error);
  CHECK_THROWS_AS(ConvKxKFunnel(s1, "odd", 5, 4, 1, 2, unit_normal(3, 9)), std::invalid_argument);
}

TEST_CASE("k x k conv: neighbourhood ansatz sizes and right inverse") {
  ParamStore store;
  Rng init(15), rng(16);
  ConvKxKFunnel c(store, "c", 6, 4, 3, 2, init, 16, 1);
  CHECK(c.context_width() == 27);
  CHECK(store.get("c.ansatz.net.l0.weight").shape() == Shape{27, 16});
  CHECK(store.get("c.ansatz.net.l1.weight").shape() == Shape{16, 18});
  perturb(store, rng, 0.3);
  check_right_inverse(c, rng, 1e-7, 100);
}

TEST_CASE("F-MLP layer") {
  ParamStore store;
  FMLPLayer id(store, "i", 3, 1, FMLPMode::exact, {}, unit_normal(2, 1));
  const Tensor x = Tensor::from_rows({{0.3, -0.4, 1.1}});
  LayerOutput out = id.forward(constant(x), {});
  CHECK(out.output.item() == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(out.contribution.item() ==
        doctest::Approx(oracle::normal_logpdf(0.3) + oracle::normal_logpdf(-0.4)).epsilon(1e-12));

  FMLPLayer f(store, "f", 2, 1, FMLPMode::exact, {}, unit_normal(1, 1));
  store.assign("f.r.log_diag", Tensor::vector({std::log(2.0)}));
  store.assign("f.w_minus", Tensor::from_rows({{1.0}}));
  CHECK(f.pre_activation(constant(Tensor::from_rows({{1.0, 3.0}}))).item() == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(f.r().log_abs_det().item() == doctest::Approx(std::log(2.0)));

  Rng rng(17);
  FMLPLayer g(store, "g", 5, 3, FMLPMode::exact, {}, unit_normal(2, 3));
  perturb(store, rng, 0.3);
  const Tensor xs = random_tensor({20, 5}, rng);
  const Tensor h = g.pre_activation(constant(xs)).value();
  const Tensor W = g.weight_matrix();
  const Tensor& b = g.bias().value();
  double worst = 0.0;
  for (std::size_t r = 0; r < 20; ++r) {
    for (std::size_t i = 0; i < 3; ++i) {
      double v = b[i];
      for (std::size_t j = 0; j < 5; ++j) v += W.at(i, j) * xs.at(r, j);
      worst = std::max(worst, std::abs(v - h.at(r, i)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("F-MLP exact mode normalizes and inverts; lower-bound mode is flagged") {
  ParamStore store;
  Rng init(18), rng(19);
  FMLPLayer f(store, "f", 2, 1, FMLPMode::exact, {8, 2.0}, init, 8, 2);
  perturb(store, rng, 0.3);
  CHECK(integrate_2d(f) == doctest::Approx(1.0).epsilon(1e-3));

  FMLPLayer big(store, "b", 6, 2, FMLPMode::exact, {8, 2.0}, init, 8, 2);
  perturb(store, rng, 0.2);
  check_right_inverse(big, rng, 1e-8);

  FMLPLayer lb(store, "lb", 4, 2, FMLPMode::lower_bound, {}, init, 8, 1);
  CHECK_FALSE(lb.exact());
  const LayerOutput out = lb.forward(constant(random_tensor({3, 4}, rng)), {});
  CHECK(out.bound_loose);
  CHECK(lb.inverse(random_tensor({3, 2}, rng), rng).shape() == Shape{3, 4});
}

TEST_CASE("square F-MLP bijection") {
  ParamStore store;
  Rng rng(20);
  FMLPBijection id(store, "i", 3, {});
  const Tensor x = random_tensor({10, 3}, rng);
  const auto r = id.forward(constant(x));
  CHECK(sup_diff(r.output.value(), x) < 1e-12);
  for (double v : r.log_abs_det.value().values()) CHECK(std::abs(v) < 1e-12);

  FMLPBijection f(store, "f", 2, {6, 2.0});
  perturb(store, rng, 0.3);
  diff::NoGradGuard guard;
  const Tensor xs = random_tensor({1000, 2}, rng);
  const auto fwd = f.forward(constant(xs));
  CHECK(sup_diff(f.inverse(fwd.output).output.value(), xs) < 1e-8);
  const double h = 1e-6;
  for (std::size_t t = 0; t < 20; ++t) {
    const double a = xs.at(t, 0), c = xs.at(t, 1);
    auto y = [&](double p, double q) { return f.forward(constant(Tensor::from_rows({{p, q}}))).output.value(); };
    const Tensor u0 = y(a + h, c), d0 = y(a - h, c), u1 = y(a, c + h), d1 = y(a, c - h);
    const double det = ((u0[0] - d0[0]) * (u1[1] - d1[1]) - (u1[0] - d1[0]) * (u0[1] - d0[1])) / (4 * h * h);
    CHECK(std::abs(std::log(std::abs(det)) - fwd.log_abs_det.value()[t]) < 1e-5);
  }
}

TEST_CASE("generative funnel") {
  Rng rng(21);
  GenerativeFunnel g(2, unit_normal(1, 2), std::make_unique<bijections::Identity>(2, 1));
  CHECK(g.output_dim() == 3);
  CHECK_FALSE(g.exact());
  const Tensor x = random_tensor({500, 2}, rng);
  const LayerOutput out = g.forward(constant(x), {true, &rng});
  for (std::size_t r = 0; r < 500; ++r) {
    const double aug = out.output.value().at(r, 2);
    CHECK(out.output.value().at(r, 0) == x.at(r, 0));
    CHECK(out.contribution.value()[r] - 0.5 * aug * aug == doctest::Approx(0.918939).epsilon(1e-6));
  }
  CHECK_THROWS_AS(g.forward(constant(x), {}), std::invalid_argument);

  ParamStore store;
  auto lu = std::make_unique<bijections::LULinear>(store, "l", 2);
  store.assign("l.log_diag", Tensor::vector({0.3, -0.1}));
  GenerativeFunnel plain(2, nullptr, std::move(lu));
  CHECK(plain.exact());
  CHECK(plain.forward(constant(x), {}).contribution.value()[0] == doctest::Approx(0.2).epsilon(1e-14));
}
