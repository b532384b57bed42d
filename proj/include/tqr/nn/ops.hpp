#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/log.hpp"
#include "tqr/nn/graph.hpp"
#include "tqr/nn/tensor.hpp"

namespace tqr::nn {

// Value-level softmax with max subtraction; masked positions are exactly 0.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits, const std::vector<bool>* mask = nullptr) {
  if (logits.rank() != 1) throw ContractViolation("softmax: expects a vector, got " + shape_string(logits.shape()));
  Tensor<T> out = logits;
  Graph<T>::softmax_inplace(out.values(), mask);
  return out;
}

// -log(prob[gold]), with prob[gold] floored at 1e-12.
template <typename T>
T cross_entropy(const Tensor<T>& prob, std::size_t gold) {
  if (gold >= prob.size()) {
    throw ContractViolation("cross_entropy: gold index " + std::to_string(gold) + " outside " +
                            std::to_string(prob.size()) + " classes");
  }
  T p = prob[gold];
  if (p < static_cast<T>(kLogFloor)) {
    warn("cross_entropy: probability of gold class " + std::to_string(gold) + " is below 1e-12; clamped");
    p = static_cast<T>(kLogFloor);
  }
  return -std::log(p);
}

}  // namespace tqr::nn
