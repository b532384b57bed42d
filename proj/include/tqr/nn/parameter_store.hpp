#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/tensor.hpp"

namespace tqr::nn {

// One learned tensor with its gradient accumulator and Adam state.
template <typename T>
struct Parameter {
  Tensor<T> value;
  Tensor<T> grad;
  Tensor<T> m;
  Tensor<T> v;
  std::size_t step = 0;
};

// Named parameters, iterated in sorted-name order. Frozen tensors (such as
// pretrained embeddings) are kept outside the store, so every entry here is
// trainable and owns a gradient buffer shaped like its value.
template <typename T>
class ParameterStore {
 public:
  using Entries = std::map<std::string, Parameter<T>>;

  Parameter<T>& add(const std::string& name, Tensor<T> value) {
    if (entries_.count(name)) throw ContractViolation("parameter store: duplicate name '" + name + "'");
    Parameter<T> p;
    p.grad = Tensor<T>(value.shape());
    p.m = Tensor<T>(value.shape());
    p.v = Tensor<T>(value.shape());
    p.value = std::move(value);
    return entries_.emplace(name, std::move(p)).first->second;
  }

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  Parameter<T>& at(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ContractViolation("parameter store: no parameter '" + name + "'");
    return it->second;
  }
  const Parameter<T>& at(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ContractViolation("parameter store: no parameter '" + name + "'");
    return it->second;
  }

  Tensor<T>& value(const std::string& name) { return at(name).value; }
  const Tensor<T>& value(const std::string& name) const { return at(name).value; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
  }

  std::size_t size() const { return entries_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& [_, p] : entries_) n += p.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& [_, p] : entries_) p.grad.fill(T(0));
  }

  Entries& entries() { return entries_; }
  const Entries& entries() const { return entries_; }

  // Copies values only; optimizer state starts fresh.
  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& [name, p] : entries_) out.add(name, p.value.template cast<U>());
    return out;
  }

  // Equality of values (not gradients or optimizer state).
  bool same_values(const ParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    for (; a != entries_.end(); ++a, ++b) {
      if (a->first != b->first || !(a->second.value == b->second.value)) return false;
    }
    return true;
  }

 private:
  Entries entries_;
};

}  // namespace tqr::nn
