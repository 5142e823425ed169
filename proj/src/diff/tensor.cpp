#include "funnel/diff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace funnel::diff {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("ragged rows in Tensor::from_rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(Shape{r, c}, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor eye(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) eye.at(i, i) = 1.0;
  return eye;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for shape " + shape_string(shape_));
  }
  return shape_[axis];
}

double Tensor::item() const {
  if (data_.size() != 1) throw std::invalid_argument("item() on tensor of shape " + shape_string(shape_));
  return data_[0];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw std::invalid_argument("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::row_range(std::size_t begin, std::size_t end) const {
  if (rank() != 2 || begin > end || end > shape_[0]) throw std::out_of_range("row_range out of bounds");
  const std::size_t cols = shape_[1];
  return Tensor(Shape{end - begin, cols},
                std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols),
                                    data_.begin() + static_cast<std::ptrdiff_t>(end * cols)));
}

Tensor Tensor::take_rows(std::span<const std::size_t> rows) const {
  if (rank() != 2) throw std::invalid_argument("take_rows requires a rank-2 tensor");
  const std::size_t cols = shape_[1];
  Tensor out(Shape{rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= shape_[0]) throw std::out_of_range("take_rows index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(rows[i] * cols), cols,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols));
  }
  return out;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor vstack(std::span<const Tensor> parts) {
  if (parts.empty()) return Tensor(Shape{0, 0});
  const std::size_t cols = parts.front().dim(1);
  std::size_t rows = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != 2 || p.dim(1) != cols) throw std::invalid_argument("vstack column mismatch");
    rows += p.dim(0);
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Tensor& p : parts) data.insert(data.end(), p.values().begin(), p.values().end());
  return Tensor(Shape{rows, cols}, std::move(data));
}

}  // namespace funnel::diff
