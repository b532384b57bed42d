#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/types.hpp"
#include "tqr/error.hpp"
#include "tqr/nn/graph.hpp"
#include "tqr/nn/layers.hpp"
#include "tqr/nn/parameter_store.hpp"
#include "tqr/nn/random.hpp"
#include "tqr/reader/decode.hpp"
#include "tqr/reader/embedding.hpp"
#include "tqr/reader/features.hpp"

namespace tqr::reader {

struct ModelConfig {
  std::size_t embedding_dim = 300;
  std::size_t hidden_size = 128;
  std::size_t max_span_len = 15;
  FeatureMask features;
  double dropout = 0.0;

  // Width of one paragraph feature vector: embedding, static block, aligned.
  std::size_t input_width() const { return 2 * embedding_dim + kStaticWidth; }
  std::size_t encoding_width() const { return 2 * hidden_size; }

  void validate() const {
    if (embedding_dim == 0) throw InputError("embedding_dim must be positive");
    if (hidden_size == 0) throw InputError("hidden_size must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw InputError("dropout must lie in [0, 1)");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["embedding_dim"] = embedding_dim;
    j["hidden_size"] = hidden_size;
    j["max_span_len"] = max_span_len;
    j["features"] = to_string(features);
    j["dropout"] = dropout;
    return j;
  }

  static ModelConfig from_json(const nlohmann::ordered_json& j) {
    ModelConfig c;
    try {
      c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
      c.hidden_size = j.at("hidden_size").get<std::size_t>();
      c.max_span_len = j.at("max_span_len").get<std::size_t>();
      c.features = parse_feature_mask(j.at("features").get<std::string>());
      c.dropout = j.value("dropout", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("model config: ") + e.what());
    }
    c.validate();
    return c;
  }
};

// Parameter names.
namespace names {
inline const std::string kAlphaW = "alpha.W";
inline const std::string kAlphaB = "alpha.b";
inline const nn::LstmNames kParaFwd{"para_rnn.fwd"};
inline const nn::LstmNames kParaBwd{"para_rnn.bwd"};
inline const nn::LstmNames kQuestionFwd{"question_rnn.fwd"};
inline const nn::LstmNames kQuestionBwd{"question_rnn.bwd"};
inline const std::string kPoolW = "question_pool.w";
inline const std::string kStartW = "span.W_start";
inline const std::string kEndW = "span.W_end";
}  // namespace names

template <typename T>
nn::ParameterStore<T> init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  nn::Rng rng(seed);
  nn::ParameterStore<T> store;
  const std::size_t d = cfg.embedding_dim, h = cfg.hidden_size, e = cfg.encoding_width();
  nn::init_dense(store, "alpha", d, d, rng);
  nn::init_lstm(store, names::kParaFwd, cfg.input_width(), h, rng);
  nn::init_lstm(store, names::kParaBwd, cfg.input_width(), h, rng);
  nn::init_lstm(store, names::kQuestionFwd, d, h, rng);
  nn::init_lstm(store, names::kQuestionBwd, d, h, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(e));
  store.add(names::kPoolW, nn::uniform_tensor<T>({e}, bound, rng));
  store.add(names::kStartW, nn::uniform_tensor<T>({e, e}, bound, rng));
  store.add(names::kEndW, nn::uniform_tensor<T>({e, e}, bound, rng));
  return store;
}

// alpha (2), four LSTM directions (3 each), pooling vector, two bilinear maps.
inline constexpr std::size_t kParameterCount = 17;

// Checks that a parameter store has the shapes implied by the config.
template <typename T>
void check_params(const nn::ParameterStore<T>& store, const ModelConfig& cfg) {
  const std::size_t d = cfg.embedding_dim, h = cfg.hidden_size, e = cfg.encoding_width(), w = cfg.input_width();
  auto expect = [&](const std::string& name, nn::Shape shape) {
    if (!store.contains(name)) throw InputError("parameters lack '" + name + "'");
    const auto& actual = store.at(name).value.shape();
    if (actual != shape) {
      throw InputError("parameter '" + name + "' has shape " + nn::shape_string(actual) + ", config implies " +
                       nn::shape_string(shape));
    }
  };
  expect(names::kAlphaW, {d, d});
  expect(names::kAlphaB, {d});
  for (const auto* n : {&names::kParaFwd, &names::kParaBwd}) {
    expect(n->w_x(), {4 * h, w});
    expect(n->w_h(), {4 * h, h});
    expect(n->bias(), {4 * h});
  }
  for (const auto* n : {&names::kQuestionFwd, &names::kQuestionBwd}) {
    expect(n->w_x(), {4 * h, d});
    expect(n->w_h(), {4 * h, h});
    expect(n->bias(), {4 * h});
  }
  expect(names::kPoolW, {e});
  expect(names::kStartW, {e, e});
  expect(names::kEndW, {e, e});
  if (store.size() != kParameterCount) {
    throw InputError("parameters hold " + std::to_string(store.size()) + " entries, expected " +
                     std::to_string(kParameterCount));
  }
}

// Per-example model inputs that do not depend on learned parameters. Static
// features are stored unmasked; the mask is applied in the forward pass.
struct ExampleInputs {
  nn::Tensor<float> paragraph;  // [m x d] embeddings
  nn::Tensor<float> question;   // [l x d] embeddings
  nn::Tensor<float> features;   // [m x kStaticWidth]
  std::size_t gold_start = 0;
  std::size_t gold_end = 0;

  std::size_t length() const { return paragraph.rows(); }
};

inline ExampleInputs make_inputs(std::span<const text::Token> paragraph, std::span<const text::Token> question,
                                 const EmbeddingTable& table) {
  if (paragraph.empty()) throw InputError("empty paragraph");
  if (question.empty()) throw InputError("empty question");
  ExampleInputs in;
  in.paragraph = table.embed(paragraph);
  in.question = table.embed(question);
  in.features = static_features(paragraph, question);
  return in;
}

inline ExampleInputs make_inputs(const corpus::QAExample& ex, const EmbeddingTable& table) {
  ExampleInputs in = make_inputs(ex.paragraph->tokens, ex.question_tokens, table);
  in.gold_start = ex.answer_start;
  in.gold_end = ex.answer_end;
  return in;
}

inline std::vector<ExampleInputs> make_inputs(const std::vector<corpus::QAExample>& examples, const EmbeddingTable& table) {
  std::vector<ExampleInputs> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(make_inputs(ex, table));
  return out;
}

// Handles to the intermediate quantities of one forward pass.
struct ReaderTrace {
  nn::Var features;          // p~, [m x input_width]
  nn::Var attention;         // a, [m x l]; invalid when aligned features are off
  nn::Var para_hidden;       // p', [m x 2h]
  nn::Var question_hidden;   // q', [l x 2h]
  nn::Var question_weights;  // b, [l]
  nn::Var pooled;            // q, [2h]
  nn::Var start_logits;      // [m]
  nn::Var end_logits;        // [m]
};

namespace detail {

template <typename T>
nn::Var dropout(nn::Graph<T>& g, nn::Var x, double rate, nn::Rng* rng) {
  if (!rng || rate <= 0.0) return x;
  nn::Tensor<T> keep(g.value(x).shape());
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& v : keep.values()) v = rng->uniform() < rate ? T(0) : scale;
  return g.mul(x, g.constant(std::move(keep)));
}

}  // namespace detail

// Full reader forward pass. Dropout is applied to the paragraph feature
// vectors and question embeddings only when `dropout_rng` is given.
template <typename T>
ReaderTrace forward(nn::Graph<T>& g, const ExampleInputs& in, const ModelConfig& cfg, nn::Rng* dropout_rng = nullptr) {
  const std::size_t m = in.paragraph.rows(), l = in.question.rows(), d = cfg.embedding_dim;
  if (m == 0) throw ContractViolation("reader: empty paragraph");
  if (l == 0) throw ContractViolation("reader: empty question");
  if (in.paragraph.cols() != d || in.question.cols() != d) {
    nn::shape_error("reader embeddings", in.paragraph.shape(), nn::Shape{m, d});
  }
  if (in.features.shape() != nn::Shape{m, kStaticWidth}) {
    nn::shape_error("reader static features", in.features.shape(), nn::Shape{m, kStaticWidth});
  }
  ReaderTrace tr;
  nn::Var ep = g.constant(in.paragraph.cast<T>());
  nn::Var eq = g.constant(in.question.cast<T>());
  nn::Tensor<T> stat = in.features.cast<T>();
  apply_mask(stat, cfg.features);
  nn::Var fs = g.constant(std::move(stat));

  nn::Var aligned;
  if (cfg.features.use_aligned) {
    nn::Var aw = g.param(names::kAlphaW), ab = g.param(names::kAlphaB);
    nn::Var ap = nn::dense_rows(g, ep, aw, ab, nn::Activation::relu);
    nn::Var aq = nn::dense_rows(g, eq, aw, ab, nn::Activation::relu);
    tr.attention = g.row_softmax(g.matmul_nt(ap, aq));
    aligned = g.matmul(tr.attention, eq);
  } else {
    aligned = g.constant(nn::Tensor<T>(nn::Shape{m, d}));
  }

  tr.features = g.hconcat({ep, fs, aligned});
  nn::Var p_in = detail::dropout(g, tr.features, cfg.dropout, dropout_rng);
  nn::Var q_in = detail::dropout(g, eq, cfg.dropout, dropout_rng);
  tr.para_hidden = nn::lstm_sequence(g, p_in, names::kParaFwd, &names::kParaBwd);
  tr.question_hidden = nn::lstm_sequence(g, q_in, names::kQuestionFwd, &names::kQuestionBwd);

  tr.question_weights = g.softmax(g.matvec(tr.question_hidden, g.param(names::kPoolW)));
  tr.pooled = g.vecmat(tr.question_weights, tr.question_hidden);

  tr.start_logits = g.matvec(tr.para_hidden, g.matvec(g.param(names::kStartW), tr.pooled));
  tr.end_logits = g.matvec(tr.para_hidden, g.matvec(g.param(names::kEndW), tr.pooled));
  return tr;
}

// Summed start and end cross-entropy for one example.
template <typename T>
nn::Var example_loss(nn::Graph<T>& g, const ExampleInputs& in, const ModelConfig& cfg, nn::Rng* dropout_rng = nullptr) {
  if (in.gold_start >= in.length() || in.gold_end >= in.length()) {
    throw ContractViolation("reader: gold span outside the paragraph");
  }
  ReaderTrace tr = forward(g, in, cfg, dropout_rng);
  return g.add(g.softmax_cross_entropy(tr.start_logits, in.gold_start),
               g.softmax_cross_entropy(tr.end_logits, in.gold_end));
}

struct ReaderOutput {
  std::vector<double> p_start;
  std::vector<double> p_end;
  SpanPrediction span;
};

inline std::vector<double> softmax_double(std::span<const float> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  nn::Graph<double>::softmax_inplace(p, nullptr);
  return p;
}

// Inference: start/end distributions and the decoded span.
inline ReaderOutput predict(const nn::ParameterStore<float>& params, const ExampleInputs& in, const ModelConfig& cfg,
                            DecodeMode mode) {
  nn::Graph<float> g(const_cast<nn::ParameterStore<float>*>(&params));
  ReaderTrace tr = forward(g, in, cfg);
  ReaderOutput out;
  out.p_start = softmax_double(g.value(tr.start_logits).values());
  out.p_end = softmax_double(g.value(tr.end_logits).values());
  out.span = decode_span<double>(out.p_start, out.p_end, mode, cfg.max_span_len);
  return out;
}

}  // namespace tqr::reader
