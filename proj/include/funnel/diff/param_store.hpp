#pragma once

#include <map>
#include <string>
#include <vector>

#include "funnel/diff/var.hpp"

namespace funnel::diff {

struct Parameter {
  std::string name;
  Var var;       // persistent leaf; its grad accumulates across backward passes
  Tensor m, v;   // Adam moments, same shape as the value
  bool trainable = true;
};

/// Named parameters in registration order. Non-trainable entries hold model
/// state that must survive checkpointing (e.g. actnorm initialization).
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  /// Registers a new entry; throws if the name is taken.
  Var add(const std::string& name, Tensor init, bool trainable = true);
  Var get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.contains(name); }

  std::vector<Parameter>& entries() noexcept { return entries_; }
  const std::vector<Parameter>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t scalar_count(bool trainable_only = true) const;

  void zero_grad();
  std::size_t step() const noexcept { return step_; }
  void set_step(std::size_t step) noexcept { step_ = step; }

  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);
  /// Overwrites the value of an existing entry; shape must match.
  void assign(const std::string& name, const Tensor& value);

 private:
  std::vector<Parameter> entries_;
  std::map<std::string, std::size_t> index_;
  std::size_t step_ = 0;
};

}  // namespace funnel::diff
