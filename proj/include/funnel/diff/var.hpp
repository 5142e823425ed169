#pragma once

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "funnel/diff/tensor.hpp"

namespace funnel::diff {

/// One recorded operation. Leaves have no inputs; parameters are leaves with
/// requires_grad set, and their grad persists across backward passes until
/// explicitly zeroed.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::string_view op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  bool is_leaf() const noexcept { return inputs.empty(); }
  /// Grad buffer, allocated as zeros on first use.
  Tensor& grad_buffer();
};

/// Handle to a node in the dynamically recorded graph. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);

  /// Records an op. When recording is disabled or no input needs a gradient
  /// the result is a plain constant.
  static Var record(Tensor value, std::string_view op, std::vector<Var> inputs,
                    std::function<void(Node&)> backward);

  explicit operator bool() const noexcept { return static_cast<bool>(node_); }
  bool defined() const noexcept { return static_cast<bool>(node_); }

  const Tensor& value() const { return node_->value; }
  /// Leaf values only; used by optimizers and parameter loading.
  Tensor& mutable_value();
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() { return node_->grad_buffer(); }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rank() const { return node_->value.rank(); }
  std::size_t dim(std::size_t axis) const { return node_->value.dim(axis); }
  double item() const { return node_->value.item(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  std::string_view op() const { return node_->op; }

  Node& node() const { return *node_; }
  const std::shared_ptr<Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

inline Var constant(Tensor value) { return Var(std::move(value), false); }

bool grad_enabled() noexcept;

/// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Reverse pass from a single-element root. Intermediate grads are reset;
/// leaf grads accumulate.
void backward(const Var& root);

}  // namespace funnel::diff
