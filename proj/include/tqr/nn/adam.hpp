#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "tqr/error.hpp"
#include "tqr/nn/parameter_store.hpp"

namespace tqr::nn {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::optional<double> gradient_clip_norm = 10.0;

  void validate() const {
    if (!(learning_rate > 0)) throw ContractViolation("optimizer: learning_rate must be > 0");
    if (!(beta1 > 0 && beta1 < 1)) throw ContractViolation("optimizer: beta1 must lie in (0, 1)");
    if (!(beta2 > 0 && beta2 < 1)) throw ContractViolation("optimizer: beta2 must lie in (0, 1)");
    if (gradient_clip_norm && !(*gradient_clip_norm > 0)) {
      throw ContractViolation("optimizer: gradient_clip_norm must be > 0");
    }
  }
};

// Global L2 norm over every gradient buffer.
template <typename T>
double gradient_norm(const ParameterStore<T>& store) {
  double total = 0;
  for (const auto& [_, p] : store.entries()) {
    for (T g : p.grad.values()) total += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(total);
}

// One bias-corrected Adam update over every parameter, after optional
// global-norm clipping. Gradient buffers are zeroed afterwards.
template <typename T>
void adam_step(ParameterStore<T>& store, const OptimizerConfig& config) {
  config.validate();
  for (const auto& [name, p] : store.entries()) {
    for (T g : p.grad.values()) {
      if (std::isnan(g) || std::isinf(g)) throw NumericError("adam_step: non-finite gradient in parameter '" + name + "'");
    }
  }
  double factor = 1.0;
  if (config.gradient_clip_norm) {
    double norm = gradient_norm(store);
    if (norm > *config.gradient_clip_norm) factor = *config.gradient_clip_norm / norm;
  }
  for (auto& [name, p] : store.entries()) {
    ++p.step;
    const double t = static_cast<double>(p.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      double g = static_cast<double>(p.grad[k]) * factor;
      double m = config.beta1 * static_cast<double>(p.m[k]) + (1.0 - config.beta1) * g;
      double v = config.beta2 * static_cast<double>(p.v[k]) + (1.0 - config.beta2) * g * g;
      p.m[k] = static_cast<T>(m);
      p.v[k] = static_cast<T>(v);
      double update = config.learning_rate * (m / c1) / (std::sqrt(v / c2) + config.epsilon);
      p.value[k] = static_cast<T>(static_cast<double>(p.value[k]) - update);
    }
    p.grad.fill(T(0));
  }
}

}  // namespace tqr::nn
