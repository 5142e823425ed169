#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library's numerics; each helper is a direct evaluation of a formula.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double normal_logpdf(double x, double mu = 0.0, double sigma = 1.0) {
  const double u = (x - mu) / sigma;
  return -0.5 * u * u - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

/// Trapezoid weights on an evenly spaced grid of `points` nodes over [lo, hi].
inline std::vector<double> trapezoid_nodes(double lo, double hi, std::size_t points, std::vector<double>& weights) {
  std::vector<double> nodes(points);
  weights.assign(points, 0.0);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    nodes[i] = lo + h * static_cast<double>(i);
    weights[i] = (i == 0 || i + 1 == points) ? 0.5 * h : h;
  }
  return nodes;
}

/// Central differences of a scalar function of a vector.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  return e;
}

/// Sample variance with the n - 1 denominator.
inline double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double mean(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

/// Gaussian draws from a generator independent of the library's Rng.
inline std::vector<double> normal_draws(std::size_t n, unsigned seed, double mu = 0.0, double sigma = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d(mu, sigma);
  std::vector<double> out(n);
  for (double& x : out) x = d(gen);
  return out;
}

}  // namespace oracle
