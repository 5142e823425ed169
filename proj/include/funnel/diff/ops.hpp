#pragma once

#include <span>
#include <vector>

#include "funnel/diff/rng.hpp"
#include "funnel/diff/var.hpp"

// Differentiable operations on rank <= 2 tensors. Binary elementwise ops
// broadcast NumPy-style (right-aligned, extent 1 stretches). Failures throw
// std::invalid_argument (shape) or std::domain_error (domain).
namespace funnel::diff {

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var neg(const Var& x);
Var add_scalar(const Var& x, double c);
Var mul_scalar(const Var& x, double c);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }
inline Var operator-(const Var& x) { return neg(x); }
inline Var operator+(const Var& x, double c) { return add_scalar(x, c); }
inline Var operator+(double c, const Var& x) { return add_scalar(x, c); }
inline Var operator-(const Var& x, double c) { return add_scalar(x, -c); }
inline Var operator-(double c, const Var& x) { return add_scalar(neg(x), c); }
inline Var operator*(const Var& x, double c) { return mul_scalar(x, c); }
inline Var operator*(double c, const Var& x) { return mul_scalar(x, c); }

Var exp(const Var& x);
/// Natural log; every element must be strictly positive.
Var log(const Var& x);
Var tanh(const Var& x);
Var sigmoid(const Var& x);
Var softplus(const Var& x);
Var relu(const Var& x);
Var square(const Var& x);
/// Elementwise clamp; the gradient is zero where the bound is active.
Var clamp(const Var& x, double lo, double hi);

/// Softmax over the last axis.
Var softmax(const Var& x);

/// Sum / mean of all elements (rank-0 result).
Var sum(const Var& x);
Var mean(const Var& x);
/// Sum over the last axis: [r, c] -> [r], [n] -> [].
Var sum_last(const Var& x);

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& x);
Var reshape(const Var& x, Shape shape);

/// Columns [begin, end) of a rank-2 tensor.
Var slice_cols(const Var& x, std::size_t begin, std::size_t end);
/// Columns by index (repeats allowed) of a rank-2 tensor.
Var select_cols(const Var& x, std::span<const std::size_t> cols);
/// Column-wise concatenation of rank-2 tensors with equal row counts.
Var concat_cols(std::span<const Var> parts);
Var concat_cols(std::initializer_list<Var> parts);

/// out[i] = x[rows[i], cols[i]] for rank-2 x; result has shape [rows.size()].
Var gather(const Var& x, std::vector<std::size_t> rows, std::vector<std::size_t> cols);

/// Inverted dropout: Bernoulli keep mask scaled by 1/(1-p) when training,
/// identity otherwise.
Var dropout(const Var& x, double p, Rng* rng, bool training);

/// log|det M| of a square matrix; gradient M^{-T}.
Var log_abs_det(const Var& m);

}  // namespace funnel::diff
