#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/evaluation/metrics.hpp"
#include "tqr/nn/adam.hpp"
#include "tqr/nn/graph.hpp"
#include "tqr/nn/random.hpp"
#include "tqr/reader/model.hpp"
#include "tqr/training/batch.hpp"
#include "tqr/training/config.hpp"

namespace tqr::training {

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<evaluation::MetricsReport> dev;  // absent when the dev split is empty

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

struct TrainResult {
  nn::ParameterStore<float> best_params;  // best dev exact match; later epochs win ties
  nn::ParameterStore<float> final_params;
  std::size_t best_epoch = 0;
  std::vector<EpochLog> log;
};

struct TrainHooks {
  std::function<void(const EpochLog&)> on_epoch;
  std::function<void(std::size_t epoch, const nn::ParameterStore<float>&)> on_checkpoint;
};

// Distinct streams derived from the run seed.
inline constexpr std::uint64_t kInitStream = 0x1;
inline constexpr std::uint64_t kShuffleStream = 0x2;
inline constexpr std::uint64_t kDropoutStream = 0x3;

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed * 0x9e3779b97f4a7c15ULL + stream;
}

inline TrainResult train(const std::vector<reader::ExampleInputs>& train_set, const std::vector<reader::ExampleInputs>& dev_set,
                         const TrainConfig& cfg, const TrainHooks& hooks = {}) {
  cfg.validate();
  if (train_set.empty()) throw InputError("training split is empty");
  auto params = reader::init_params<float>(cfg.model, stream_seed(cfg.seed, kInitStream));
  nn::Rng shuffle_rng(stream_seed(cfg.seed, kShuffleStream));
  nn::Rng dropout_rng(stream_seed(cfg.seed, kDropoutStream));
  nn::Rng* dropout = cfg.model.dropout > 0.0 ? &dropout_rng : nullptr;

  TrainResult result;
  std::optional<double> best_exact;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double total = 0.0;
    std::size_t step = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<const reader::ExampleInputs*> members;
      for (std::size_t i = begin; i < end; ++i) members.push_back(&train_set[order[i]]);
      Batch batch = make_batch(members);
      nn::Graph<float> g(&params);
      nn::Var loss = compute_loss(g, batch, cfg.model, dropout);
      const double value = g.value(loss)[0];
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " + std::to_string(step + 1));
      }
      g.backward(loss);
      try {
        nn::adam_step(params, cfg.optimizer);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(step + 1));
      }
      total += value * static_cast<double>(batch.size());
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = total / static_cast<double>(train_set.size());
    if (!dev_set.empty()) entry.dev = evaluation::evaluate(dev_set, params, cfg.model);
    const double exact = entry.dev ? entry.dev->exact_match : 0.0;
    if (!best_exact || exact >= *best_exact) {
      best_exact = exact;
      result.best_epoch = epoch;
      result.best_params = params;
    }
    result.log.push_back(entry);
    if (hooks.on_epoch) hooks.on_epoch(entry);
    if (hooks.on_checkpoint && cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) {
      hooks.on_checkpoint(epoch, params);
    }
  }
  result.final_params = std::move(params);
  return result;
}

inline std::string loss_log_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,dev_start_acc,dev_end_acc,dev_mean,dev_exact\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + evaluation::format_number(e.train_loss);
    if (e.dev) {
      out += "," + evaluation::format_number(e.dev->start_acc) + "," + evaluation::format_number(e.dev->end_acc) + "," +
             evaluation::format_number(e.dev->mean) + "," + evaluation::format_number(e.dev->exact_match);
    } else {
      out += ",,,,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace tqr::training
