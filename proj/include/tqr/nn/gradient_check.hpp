#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/parameter_store.hpp"

namespace tqr::nn {

struct GradientCheckResult {
  double max_relative_error = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0;
  double numeric = 0;
  std::size_t components = 0;
};

// The closure runs a full forward and backward pass: it accumulates the
// analytic gradient into the store and returns the loss.
using LossClosure = std::function<double(ParameterStore<double>&)>;

// Compares every analytic gradient component against a central finite
// difference. Relative error is |a - f| / max(|a|, |f|, 1e-8).
inline GradientCheckResult gradient_check(const LossClosure& loss, ParameterStore<double>& store,
                                          double epsilon = 1e-4) {
  store.zero_grad();
  const double base = loss(store);
  std::vector<std::vector<double>> analytic;
  for (const auto& [_, p] : store.entries()) analytic.emplace_back(p.grad.values().begin(), p.grad.values().end());

  store.zero_grad();
  const double again = loss(store);
  if (again != base) {
    throw ContractViolation("gradient_check: closure is not deterministic (" + std::to_string(base) + " vs " +
                            std::to_string(again) + ")");
  }

  GradientCheckResult result;
  std::size_t index = 0;
  for (auto& [name, p] : store.entries()) {
    const auto& a = analytic[index++];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + epsilon;
      const double up = loss(store);
      p.value[k] = saved - epsilon;
      const double down = loss(store);
      p.value[k] = saved;
      const double numeric = (up - down) / (2 * epsilon);
      const double denom = std::max({std::abs(a[k]), std::abs(numeric), 1e-8});
      const double rel = std::abs(a[k] - numeric) / denom;
      ++result.components;
      if (rel > result.max_relative_error || result.worst_parameter.empty()) {
        if (rel >= result.max_relative_error) {
          result.max_relative_error = rel;
          result.worst_parameter = name;
          result.worst_index = k;
          result.analytic = a[k];
          result.numeric = numeric;
        }
      }
    }
  }
  store.zero_grad();
  return result;
}

}  // namespace tqr::nn
