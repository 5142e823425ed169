#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace funnel::diff {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major float64 array. A rank-0 tensor holds a single scalar.
class Tensor {
 public:
  Tensor() : shape_{0} {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t axis) const;
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const double* data() const noexcept { return data_.data(); }
  double* data() noexcept { return data_.data(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t row, std::size_t col) const { return data_[row * shape_[1] + col]; }
  double& at(std::size_t row, std::size_t col) { return data_[row * shape_[1] + col]; }

  /// Value of a single-element tensor.
  double item() const;
  Tensor reshaped(Shape shape) const;
  /// Rows [begin, end) of a rank-2 tensor.
  Tensor row_range(std::size_t begin, std::size_t end) const;
  /// Rows picked by index from a rank-2 tensor.
  Tensor take_rows(std::span<const std::size_t> rows) const;
  bool all_finite() const;
  void fill(double value);

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Concatenates rank-2 tensors with equal column counts along rows.
Tensor vstack(std::span<const Tensor> parts);

}  // namespace funnel::diff
