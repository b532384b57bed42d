#pragma once

#include <span>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/graph.hpp"
#include "tqr/nn/random.hpp"
#include "tqr/reader/model.hpp"

namespace tqr::training {

// A group of examples padded to common lengths. Masks mark real positions.
struct Batch {
  std::vector<const reader::ExampleInputs*> examples;
  std::size_t paragraph_len = 0;
  std::size_t question_len = 0;
  std::vector<std::vector<bool>> paragraph_mask;
  std::vector<std::vector<bool>> question_mask;
  std::vector<std::size_t> gold_start;
  std::vector<std::size_t> gold_end;

  std::size_t size() const { return examples.size(); }
};

inline Batch make_batch(std::span<const reader::ExampleInputs* const> examples, std::size_t min_paragraph_len = 0) {
  if (examples.empty()) throw ContractViolation("make_batch: no examples");
  Batch b;
  b.paragraph_len = min_paragraph_len;
  for (const auto* ex : examples) {
    b.paragraph_len = std::max(b.paragraph_len, ex->paragraph.rows());
    b.question_len = std::max(b.question_len, ex->question.rows());
  }
  for (const auto* ex : examples) {
    b.examples.push_back(ex);
    std::vector<bool> pm(b.paragraph_len, false), qm(b.question_len, false);
    std::fill(pm.begin(), pm.begin() + static_cast<std::ptrdiff_t>(ex->paragraph.rows()), true);
    std::fill(qm.begin(), qm.begin() + static_cast<std::ptrdiff_t>(ex->question.rows()), true);
    b.paragraph_mask.push_back(std::move(pm));
    b.question_mask.push_back(std::move(qm));
    b.gold_start.push_back(ex->gold_start);
    b.gold_end.push_back(ex->gold_end);
  }
  return b;
}

inline Batch make_batch(const std::vector<reader::ExampleInputs>& examples) {
  std::vector<const reader::ExampleInputs*> ptrs;
  for (const auto& ex : examples) ptrs.push_back(&ex);
  return make_batch(ptrs);
}

// Mean over examples of start + end cross-entropy. Each example runs at its
// true length; its logits are padded to the batch length and the padded
// positions are masked out of both softmaxes.
template <typename T>
nn::Var compute_loss(nn::Graph<T>& g, const Batch& batch, const reader::ModelConfig& cfg, nn::Rng* dropout_rng = nullptr) {
  if (batch.size() == 0) throw ContractViolation("compute_loss: empty batch");
  std::vector<nn::Var> losses;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& mask = batch.paragraph_mask[k];
    const std::size_t m = batch.examples[k]->paragraph.rows();
    for (std::size_t gold : {batch.gold_start[k], batch.gold_end[k]}) {
      if (gold >= mask.size() || !mask[gold]) {
        throw ContractViolation("compute_loss: gold index " + std::to_string(gold) + " of example " + std::to_string(k) +
                                " falls on padding (true length " + std::to_string(m) + ")");
      }
    }
    reader::ReaderTrace tr = reader::forward(g, *batch.examples[k], cfg, dropout_rng);
    nn::Var s = tr.start_logits, e = tr.end_logits;
    if (batch.paragraph_len > m) {
      nn::Var pad = g.constant(nn::Tensor<T>(nn::Shape{batch.paragraph_len - m}));
      s = g.concat({s, pad});
      e = g.concat({e, pad});
    }
    losses.push_back(g.softmax_cross_entropy(s, batch.gold_start[k], &mask));
    losses.push_back(g.softmax_cross_entropy(e, batch.gold_end[k], &mask));
  }
  return g.scale(g.sum(losses), T(1) / static_cast<T>(batch.size()));
}

}  // namespace tqr::training
