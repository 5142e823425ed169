#include "funnel/data/tabular.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace funnel::data {

using diff::Shape;

Standardization Standardization::fit(const Tensor& x) {
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (rows < 2) throw std::invalid_argument("standardize: need at least two rows");
  Standardization s;
  s.mean.assign(cols, 0.0);
  s.scale.assign(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < rows; ++i) m += x.at(i, j);
    m /= static_cast<double>(rows);
    double v = 0.0;
    for (std::size_t i = 0; i < rows; ++i) v += (x.at(i, j) - m) * (x.at(i, j) - m);
    v /= static_cast<double>(rows);
    if (!(v > 0.0)) throw std::invalid_argument("standardize: column " + std::to_string(j) + " is constant");
    s.mean[j] = m;
    s.scale[j] = std::sqrt(v);
  }
  return s;
}

Tensor Standardization::apply(const Tensor& x) const {
  if (empty()) return x;
  if (x.dim(1) != mean.size()) throw std::invalid_argument("standardize: feature count mismatch");
  Tensor out = x;
  for (std::size_t i = 0; i < x.dim(0); ++i) {
    for (std::size_t j = 0; j < mean.size(); ++j) out.at(i, j) = (x.at(i, j) - mean[j]) / scale[j];
  }
  return out;
}

Tensor Standardization::invert(const Tensor& x) const {
  if (empty()) return x;
  if (x.dim(1) != mean.size()) throw std::invalid_argument("standardize: feature count mismatch");
  Tensor out = x;
  for (std::size_t i = 0; i < x.dim(0); ++i) {
    for (std::size_t j = 0; j < mean.size(); ++j) out.at(i, j) = x.at(i, j) * scale[j] + mean[j];
  }
  return out;
}

double Standardization::log_jacobian() const {
  double total = 0.0;
  for (double s : scale) total -= std::log(s);
  return total;
}

Tensor four_circles(std::size_t n, std::uint64_t seed, const FourCircles& g) {
  if (n == 0) throw std::invalid_argument("four_circles: n must be positive");
  Rng rng(seed);
  Tensor out(Shape{n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t component = rng.next_u64() % 4;
    const double cx = (component & 1) ? g.center : -g.center;
    const double cy = (component & 2) ? g.center : -g.center;
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const double r = g.radius + g.radial_noise * rng.normal();
    out.at(i, 0) = cx + r * std::cos(angle);
    out.at(i, 1) = cy + r * std::sin(angle);
  }
  return out;
}

std::vector<double> distance_to_nearest_center(const Tensor& points, const FourCircles& g) {
  std::vector<double> d(points.dim(0));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double ax = std::abs(points.at(i, 0)), ay = std::abs(points.at(i, 1));
    // Nearest centre lies in the point's quadrant.
    d[i] = std::hypot(ax - g.center, ay - g.center);
  }
  return d;
}

Tensor gaussian_samples(std::size_t n, const std::vector<double>& mean, const std::vector<double>& cholesky,
                        std::uint64_t seed) {
  const std::size_t d = mean.size();
  if (cholesky.size() != d * d) throw std::invalid_argument("gaussian_samples: cholesky must be d x d");
  Rng rng(seed);
  Tensor out(Shape{n, d});
  std::vector<double> eps(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& e : eps) e = rng.normal();
    for (std::size_t r = 0; r < d; ++r) {
      double v = mean[r];
      for (std::size_t c = 0; c <= r; ++c) v += cholesky[r * d + c] * eps[c];
      out.at(i, r) = v;
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Tensor read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    std::vector<double> parsed(cells.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], parsed[c])) {
        numeric = false;
        bad = c;
        break;
      }
    }
    if (!numeric) {
      if (rows == 0 && cols == 0) {  // header line
        cols = cells.size();
        continue;
      }
      throw std::runtime_error("csv: non-numeric cell '" + trim(cells[bad]) + "' at line " + std::to_string(line_no) +
                               ", column " + std::to_string(bad + 1) + " of " + path.string());
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(cols));
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("csv: no data rows in " + path.string());
  return Tensor(Shape{rows, cols}, std::move(values));
}

void write_csv(const std::filesystem::path& path, const Tensor& rows, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path.string());
  const std::size_t cols = rows.rank() == 2 ? rows.dim(1) : 1;
  const std::size_t n = rows.rank() == 2 ? rows.dim(0) : rows.size();
  for (std::size_t c = 0; c < cols; ++c) {
    out << (c ? "," : "") << (c < header.size() ? header[c] : "x" + std::to_string(c));
  }
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << rows[i * cols + c];
    out << '\n';
  }
}

DatasetSplit split_rows(const Tensor& rows, bool standardize, std::uint64_t seed, SplitFractions fractions) {
  const std::size_t n = rows.dim(0);
  const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::floor(fractions.test * static_cast<double>(n)));
  if (n_val + n_test >= n) throw std::invalid_argument("split: not enough rows for the requested fractions");
  Rng rng(seed);
  const std::vector<std::size_t> order = rng.permutation(n);
  std::span<const std::size_t> all(order);
  DatasetSplit split;
  split.test = rows.take_rows(all.subspan(0, n_test));
  split.val = rows.take_rows(all.subspan(n_test, n_val));
  split.train = rows.take_rows(all.subspan(n_test + n_val));
  if (standardize) {
    split.standardization = Standardization::fit(split.train);
    split.train = split.standardization.apply(split.train);
    split.val = split.standardization.apply(split.val);
    split.test = split.standardization.apply(split.test);
  }
  return split;
}

DatasetSplit load_csv_tabular(const std::filesystem::path& path, bool standardize, std::uint64_t seed,
                              SplitFractions fractions) {
  return split_rows(read_csv(path), standardize, seed, fractions);
}

}  // namespace funnel::data
