#include "funnel/diff/param_store.hpp"

#include <stdexcept>

namespace funnel::diff {

Var ParamStore::add(const std::string& name, Tensor init, bool trainable) {
  if (index_.contains(name)) throw std::invalid_argument("duplicate parameter name '" + name + "'");
  const Shape shape = init.shape();
  Parameter p{name, Var(std::move(init), trainable), Tensor(shape), Tensor(shape), trainable};
  index_.emplace(name, entries_.size());
  entries_.push_back(std::move(p));
  return entries_.back().var;
}

Var ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return entries_[it->second].var;
}

std::size_t ParamStore::scalar_count(bool trainable_only) const {
  std::size_t n = 0;
  for (const Parameter& p : entries_) {
    if (p.trainable || !trainable_only) n += p.var.size();
  }
  return n;
}

void ParamStore::zero_grad() {
  for (Parameter& p : entries_) {
    if (p.trainable) p.var.mutable_grad().fill(0.0);
  }
}

std::vector<Tensor> ParamStore::snapshot() const {
  std::vector<Tensor> values;
  values.reserve(entries_.size());
  for (const Parameter& p : entries_) values.push_back(p.var.value());
  return values;
}

void ParamStore::restore(const std::vector<Tensor>& values) {
  if (values.size() != entries_.size()) throw std::invalid_argument("restore: parameter count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].shape() != entries_[i].var.shape()) {
      throw std::invalid_argument("restore: shape mismatch for '" + entries_[i].name + "'");
    }
    entries_[i].var.mutable_value() = values[i];
  }
}

void ParamStore::assign(const std::string& name, const Tensor& value) {
  Var v = get(name);
  if (v.shape() != value.shape()) {
    throw std::invalid_argument("assign: shape mismatch for '" + name + "', expected " + shape_string(v.shape()) +
                                ", got " + shape_string(value.shape()));
  }
  v.mutable_value() = value;
}

}  // namespace funnel::diff
