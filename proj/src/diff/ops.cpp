#include "funnel/diff/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace funnel::diff {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

void require_rank_le2(const Var& x, const char* op) {
  if (x.rank() > 2) {
    throw std::invalid_argument(std::string(op) + ": rank > 2 not supported, got " + shape_string(x.shape()));
  }
}

void require_rank(const Var& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw std::invalid_argument(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                                shape_string(x.shape()));
  }
}

// Rank <= 2 tensor viewed as rows x cols.
struct Extent {
  std::size_t rows, cols;
};

Extent extent_of(const Shape& s) {
  if (s.empty()) return {1, 1};
  if (s.size() == 1) return {1, s[0]};
  return {s[0], s[1]};
}

struct Broadcast {
  Shape out;
  std::size_t rows, cols;
  std::size_t a_row, a_col, b_row, b_col;  // strides; 0 where broadcast
};

Broadcast broadcast(const Shape& a, const Shape& b, const char* op) {
  if (a.size() > 2 || b.size() > 2) throw std::invalid_argument(std::string(op) + ": rank > 2 not supported");
  const Extent ea = extent_of(a), eb = extent_of(b);
  auto join = [&](std::size_t x, std::size_t y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " + shape_string(b));
  };
  Broadcast bc{};
  bc.rows = join(ea.rows, eb.rows);
  bc.cols = join(ea.cols, eb.cols);
  const std::size_t rank = std::max(a.size(), b.size());
  if (rank == 2) bc.out = {bc.rows, bc.cols};
  else if (rank == 1) bc.out = {bc.cols};
  bc.a_col = ea.cols == 1 ? 0 : 1;
  bc.a_row = ea.rows == 1 ? 0 : ea.cols;
  bc.b_col = eb.cols == 1 ? 0 : 1;
  bc.b_row = eb.rows == 1 ? 0 : eb.cols;
  return bc;
}

// Elementwise binary op. `f` computes the value, `da`/`db` the partials given
// (a, b, out).
template <class F, class DA, class DB>
Var binary(const Var& a, const Var& b, std::string_view name, F f, DA da, DB db) {
  const Broadcast bc = broadcast(a.shape(), b.shape(), name.data());
  Tensor out(bc.out);
  const double* pa = a.value().data();
  const double* pb = b.value().data();
  double* po = out.data();
  for (std::size_t i = 0; i < bc.rows; ++i) {
    for (std::size_t j = 0; j < bc.cols; ++j) {
      po[i * bc.cols + j] = f(pa[i * bc.a_row + j * bc.a_col], pb[i * bc.b_row + j * bc.b_col]);
    }
  }
  return Var::record(std::move(out), name, {a, b}, [bc, da, db](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const double* pa = na.value.data();
    const double* pb = nb.value.data();
    const double* po = self.value.data();
    const double* g = self.grad.data();
    double* ga = na.requires_grad ? na.grad_buffer().data() : nullptr;
    double* gb = nb.requires_grad ? nb.grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < bc.rows; ++i) {
      for (std::size_t j = 0; j < bc.cols; ++j) {
        const std::size_t k = i * bc.cols + j;
        const std::size_t ia = i * bc.a_row + j * bc.a_col;
        const std::size_t ib = i * bc.b_row + j * bc.b_col;
        if (ga) ga[ia] += g[k] * da(pa[ia], pb[ib], po[k]);
        if (gb) gb[ib] += g[k] * db(pa[ia], pb[ib], po[k]);
      }
    }
  });
}

// Elementwise unary op; `df(x, y)` is dy/dx.
template <class F, class DF>
Var unary(const Var& x, std::string_view name, F f, DF df) {
  Tensor out(x.shape());
  const double* px = x.value().data();
  double* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] = f(px[i]);
  return Var::record(std::move(out), name, {x}, [df](Node& self) {
    Node& in = *self.inputs[0];
    const double* px = in.value.data();
    const double* py = self.value.data();
    const double* g = self.grad.data();
    double* gx = in.grad_buffer().data();
    for (std::size_t i = 0; i < self.value.size(); ++i) gx[i] += g[i] * df(px[i], py[i]);
  });
}

double stable_softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Var div(const Var& a, const Var& b) {
  for (double v : b.value().values()) {
    if (v == 0.0) throw std::domain_error("div: division by zero");
  }
  return binary(
      a, b, "div", [](double x, double y) { return x / y; }, [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double out) { return -out / y; });
}

Var neg(const Var& x) {
  return unary(x, "neg", [](double v) { return -v; }, [](double, double) { return -1.0; });
}

Var add_scalar(const Var& x, double c) {
  return unary(x, "add_scalar", [c](double v) { return v + c; }, [](double, double) { return 1.0; });
}

Var mul_scalar(const Var& x, double c) {
  return unary(x, "mul_scalar", [c](double v) { return v * c; }, [c](double, double) { return c; });
}

Var exp(const Var& x) {
  return unary(x, "exp", [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var log(const Var& x) {
  const auto values = x.value().values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw std::domain_error("log: non-positive input " + std::to_string(values[i]) + " at index " +
                              std::to_string(i));
    }
  }
  return unary(x, "log", [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var tanh(const Var& x) {
  return unary(x, "tanh", [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(const Var& x) {
  return unary(x, "sigmoid", stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var softplus(const Var& x) {
  return unary(x, "softplus", stable_softplus, [](double v, double) { return stable_sigmoid(v); });
}

Var relu(const Var& x) {
  return unary(
      x, "relu", [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var square(const Var& x) {
  return unary(x, "square", [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Var clamp(const Var& x, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  return unary(
      x, "clamp", [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v < lo || v > hi) ? 0.0 : 1.0; });
}

Var softmax(const Var& x) {
  require_rank_le2(x, "softmax");
  const Extent e = extent_of(x.shape());
  Tensor out(x.shape());
  const double* px = x.value().data();
  double* po = out.data();
  for (std::size_t i = 0; i < e.rows; ++i) {
    const double* row = px + i * e.cols;
    double* orow = po + i * e.cols;
    const double m = *std::max_element(row, row + e.cols);
    double total = 0.0;
    for (std::size_t j = 0; j < e.cols; ++j) total += (orow[j] = std::exp(row[j] - m));
    for (std::size_t j = 0; j < e.cols; ++j) orow[j] /= total;
  }
  return Var::record(std::move(out), "softmax", {x}, [e](Node& self) {
    Node& in = *self.inputs[0];
    const double* y = self.value.data();
    const double* g = self.grad.data();
    double* gx = in.grad_buffer().data();
    for (std::size_t i = 0; i < e.rows; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < e.cols; ++j) dot += g[i * e.cols + j] * y[i * e.cols + j];
      for (std::size_t j = 0; j < e.cols; ++j) {
        const std::size_t k = i * e.cols + j;
        gx[k] += y[k] * (g[k] - dot);
      }
    }
  });
}

Var sum(const Var& x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return Var::record(Tensor::scalar(total), "sum", {x}, [](Node& self) {
    Node& in = *self.inputs[0];
    const double g = self.grad[0];
    for (double& v : in.grad_buffer().values()) v += g;
  });
}

Var mean(const Var& x) {
  if (x.size() == 0) throw std::invalid_argument("mean of an empty tensor");
  return mul_scalar(sum(x), 1.0 / static_cast<double>(x.size()));
}

Var sum_last(const Var& x) {
  require_rank_le2(x, "sum_last");
  if (x.rank() == 0) return x;
  const Extent e = extent_of(x.shape());
  Shape shape = x.rank() == 2 ? Shape{e.rows} : Shape{};
  Tensor out(shape);
  const double* px = x.value().data();
  for (std::size_t i = 0; i < e.rows; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < e.cols; ++j) total += px[i * e.cols + j];
    out[i] = total;
  }
  return Var::record(std::move(out), "sum_last", {x}, [e](Node& self) {
    Node& in = *self.inputs[0];
    double* gx = in.grad_buffer().data();
    for (std::size_t i = 0; i < e.rows; ++i) {
      const double g = self.grad[i];
      for (std::size_t j = 0; j < e.cols; ++j) gx[i * e.cols + j] += g;
    }
  });
}

Var matmul(const Var& a, const Var& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  if (b.dim(0) != k) {
    throw std::invalid_argument("matmul: inner dimensions differ, " + shape_string(a.shape()) + " x " +
                                shape_string(b.shape()));
  }
  Tensor out(Shape{n, m});
  MatrixMap(out.data(), n, m).noalias() =
      ConstMatrixMap(a.value().data(), n, k) * ConstMatrixMap(b.value().data(), k, m);
  return Var::record(std::move(out), "matmul", {a, b}, [n, k, m](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    ConstMatrixMap g(self.grad.data(), n, m);
    if (na.requires_grad) {
      MatrixMap(na.grad_buffer().data(), n, k).noalias() += g * ConstMatrixMap(nb.value.data(), k, m).transpose();
    }
    if (nb.requires_grad) {
      MatrixMap(nb.grad_buffer().data(), k, m).noalias() += ConstMatrixMap(na.value.data(), n, k).transpose() * g;
    }
  });
}

Var transpose(const Var& x) {
  require_rank(x, 2, "transpose");
  const std::size_t r = x.dim(0), c = x.dim(1);
  Tensor out(Shape{c, r});
  MatrixMap(out.data(), c, r) = ConstMatrixMap(x.value().data(), r, c).transpose();
  return Var::record(std::move(out), "transpose", {x}, [r, c](Node& self) {
    Node& in = *self.inputs[0];
    MatrixMap(in.grad_buffer().data(), r, c) += ConstMatrixMap(self.grad.data(), c, r).transpose();
  });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return Var::record(std::move(out), "reshape", {x}, [](Node& self) {
    Node& in = *self.inputs[0];
    double* gx = in.grad_buffer().data();
    const double* g = self.grad.data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += g[i];
  });
}

Var slice_cols(const Var& x, std::size_t begin, std::size_t end) {
  require_rank(x, 2, "slice_cols");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (begin > end || end > cols) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                ") out of bounds for " + shape_string(x.shape()));
  }
  const std::size_t w = end - begin;
  Tensor out(Shape{rows, w});
  const double* px = x.value().data();
  for (std::size_t i = 0; i < rows; ++i) std::copy_n(px + i * cols + begin, w, out.data() + i * w);
  return Var::record(std::move(out), "slice_cols", {x}, [rows, cols, begin, w](Node& self) {
    Node& in = *self.inputs[0];
    double* gx = in.grad_buffer().data();
    const double* g = self.grad.data();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < w; ++j) gx[i * cols + begin + j] += g[i * w + j];
    }
  });
}

Var select_cols(const Var& x, std::span<const std::size_t> cols) {
  require_rank(x, 2, "select_cols");
  const std::size_t rows = x.dim(0), in_cols = x.dim(1);
  for (std::size_t c : cols) {
    if (c >= in_cols) throw std::invalid_argument("select_cols: column index " + std::to_string(c) + " out of range");
  }
  std::vector<std::size_t> idx(cols.begin(), cols.end());
  const std::size_t w = idx.size();
  Tensor out(Shape{rows, w});
  const double* px = x.value().data();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = px[i * in_cols + idx[j]];
  }
  return Var::record(std::move(out), "select_cols", {x}, [rows, in_cols, idx = std::move(idx)](Node& self) {
    Node& in = *self.inputs[0];
    double* gx = in.grad_buffer().data();
    const double* g = self.grad.data();
    const std::size_t w = idx.size();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < w; ++j) gx[i * in_cols + idx[j]] += g[i * w + j];
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const std::size_t rows = parts.front().dim(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    require_rank(p, 2, "concat_cols");
    if (p.dim(0) != rows) throw std::invalid_argument("concat_cols: row counts differ");
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  Tensor out(Shape{rows, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const double* pp = parts[k].value().data();
    for (std::size_t i = 0; i < rows; ++i) std::copy_n(pp + i * widths[k], widths[k], out.data() + i * total + offset);
    offset += widths[k];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return Var::record(std::move(out), "concat_cols", std::move(inputs), [rows, total, widths](Node& self) {
    std::size_t offset = 0;
    const double* g = self.grad.data();
    for (std::size_t k = 0; k < widths.size(); ++k) {
      Node& in = *self.inputs[k];
      if (in.requires_grad) {
        double* gx = in.grad_buffer().data();
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < widths[k]; ++j) gx[i * widths[k] + j] += g[i * total + offset + j];
        }
      }
      offset += widths[k];
    }
  });
}

Var concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

Var gather(const Var& x, std::vector<std::size_t> rows, std::vector<std::size_t> cols) {
  require_rank(x, 2, "gather");
  if (rows.size() != cols.size()) throw std::invalid_argument("gather: rows and cols differ in length");
  const std::size_t r = x.dim(0), c = x.dim(1);
  Tensor out(Shape{rows.size()});
  const double* px = x.value().data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= r || cols[i] >= c) throw std::invalid_argument("gather: index out of range");
    out[i] = px[rows[i] * c + cols[i]];
  }
  return Var::record(std::move(out), "gather", {x},
                     [c, rows = std::move(rows), cols = std::move(cols)](Node& self) {
                       Node& in = *self.inputs[0];
                       double* gx = in.grad_buffer().data();
                       for (std::size_t i = 0; i < rows.size(); ++i) gx[rows[i] * c + cols[i]] += self.grad[i];
                     });
}

Var dropout(const Var& x, double p, Rng* rng, bool training) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: rate must lie in [0, 1)");
  if (!training || p == 0.0) return x;
  if (!rng) throw std::invalid_argument("dropout: training mode needs a random stream");
  Tensor mask(x.shape());
  const double keep = 1.0 / (1.0 - p);
  for (double& m : mask.values()) m = rng->uniform() >= p ? keep : 0.0;
  return mul(x, constant(std::move(mask)));
}

Var log_abs_det(const Var& m) {
  require_rank(m, 2, "log_abs_det");
  const std::size_t n = m.dim(0);
  if (m.dim(1) != n) throw std::invalid_argument("log_abs_det: matrix is not square");
  Eigen::PartialPivLU<RowMatrix> lu(ConstMatrixMap(m.value().data(), n, n));
  const RowMatrix& packed = lu.matrixLU();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(packed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    if (d == 0.0) throw std::domain_error("log_abs_det: singular matrix");
    total += std::log(d);
  }
  return Var::record(Tensor::scalar(total), "log_abs_det", {m}, [n](Node& self) {
    Node& in = *self.inputs[0];
    const RowMatrix inv = ConstMatrixMap(in.value.data(), n, n).inverse();
    MatrixMap(in.grad_buffer().data(), n, n) += self.grad[0] * inv.transpose();
  });
}

}  // namespace funnel::diff
