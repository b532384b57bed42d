#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/dataset.hpp"
#include "tqr/reader/model.hpp"
#include "tqr/training/config.hpp"
#include "tqr/training/model_io.hpp"

namespace tqr::test {

// A reader whose raw predictions are known without running any training:
// W_start = 0 makes P_start uniform (argmax 0); zero recurrent and input
// weights with positive biases make the forward paragraph state grow along
// the sequence, and W_end = I turns that into end logits increasing in
// position (argmax m - 1).
inline reader::ModelConfig fixture_config() {
  reader::ModelConfig cfg;
  cfg.embedding_dim = 8;
  cfg.hidden_size = 4;
  return cfg;
}

inline nn::ParameterStore<float> fixture_params() {
  const auto cfg = fixture_config();
  auto store = reader::init_params<float>(cfg, 11);
  for (const auto* n : {&reader::names::kParaFwd, &reader::names::kParaBwd, &reader::names::kQuestionFwd,
                        &reader::names::kQuestionBwd}) {
    store.at(n->w_x()).value.fill(0.0f);
    store.at(n->w_h()).value.fill(0.0f);
    store.at(n->bias()).value.fill(0.0f);
  }
  const std::size_t h = cfg.hidden_size;
  for (const auto* n : {&reader::names::kParaFwd, &reader::names::kQuestionFwd}) {
    auto& b = store.at(n->bias()).value;
    for (std::size_t k = 0; k < h; ++k) {
      b[k] = 1.0f;          // input gate
      b[2 * h + k] = 1.0f;  // candidate
      b[3 * h + k] = 1.0f;  // output gate
    }
  }
  store.at(reader::names::kPoolW).value.fill(0.0f);
  store.at(reader::names::kStartW).value.fill(0.0f);
  store.at(reader::names::kEndW).value = nn::Tensor<float>::identity(cfg.encoding_width());
  return store;
}

// Four examples over two paragraphs. Golds (0, m-1), (1, m-1), (0, m-1),
// (1, 1) against predictions (0, m-1): two starts right, three ends right,
// two exact.
inline std::string fixture_jsonl() {
  auto record = [](const std::string& doc, const std::string& text, const std::string& q, std::size_t a,
                   std::size_t b) {
    auto tokens = text::tokenize(text);
    corpus::Json r;
    r["doc_id"] = doc;
    r["para_id"] = "p0";
    r["paragraph_text"] = text;
    r["timexes"] = corpus::Json::array();
    r["question"] = q;
    r["answer_token_start"] = a;
    r["answer_token_end"] = b;
    r["answer_text"] = text::detokenize(text, tokens, a, b);
    return r.dump() + "\n";
  };
  const std::string first = "The royal family fled on 20 June 1791";
  const std::string second = "Peace returned in 1918";
  return record("fixture-a", first, "When did the royal family flee?", 0, 7) +
         record("fixture-a", first, "Who fled on 20 June 1791?", 1, 7) +
         record("fixture-b", second, "When did peace return?", 0, 3) +
         record("fixture-b", second, "What returned in 1918?", 1, 1);
}

inline std::vector<corpus::QAExample> fixture_examples() { return corpus::parse_dataset(fixture_jsonl(), "fixture"); }

inline training::TrainedModel fixture_model(const std::vector<corpus::QAExample>& examples) {
  training::TrainedModel model;
  model.config = fixture_config();
  model.params = fixture_params();
  model.embeddings =
      reader::EmbeddingTable::random(training::vocabulary({&examples}), model.config.embedding_dim, 3);
  model.df = corpus::document_frequency(examples);
  return model;
}

// Writes dev.jsonl holding the fixture set and a checkpoint directory.
inline void write_fixture(const std::filesystem::path& data_dir, const std::filesystem::path& model_dir) {
  std::filesystem::create_directories(data_dir);
  corpus::write_file(data_dir / "dev.jsonl", fixture_jsonl());
  training::save_model(model_dir, fixture_model(fixture_examples()));
}

// The four-paragraph tf-idf corpus and its hand-derived values.
inline const std::vector<std::string>& tfidf_paragraphs() {
  static const std::vector<std::string> p = {"the king fled the city", "the queen fled", "the army marched",
                                             "june 1791"};
  return p;
}

// df: the=3, fled=2, every other form 1; N = 4.
//   P1 (len 5): the 0.4*ln(4/4)=0, king 0.2*ln 2, fled 0.2*ln(4/3), city 0.2*ln 2
//   P2 (len 3): the 0, queen ln(2)/3, fled ln(4/3)/3
//   P3 (len 3): the 0, army ln(2)/3, marched ln(2)/3
//   P4 (len 2): june ln(2)/2, 1791 ln(2)/2
inline const std::vector<std::vector<double>>& tfidf_table() {
  static const std::vector<std::vector<double>> t = {
      {0.0, 0.138629436111989062, 0.0575364144903561855, 0.0, 0.138629436111989062},
      {0.0, 0.231049060186648436, 0.0958940241505936425},
      {0.0, 0.231049060186648436, 0.231049060186648436},
      {0.346573590279972655, 0.346573590279972655},
  };
  return t;
}

// Small dimensions for runs that only exercise plumbing.
inline training::TrainConfig small_train_config(std::size_t epochs = 8) {
  training::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.seed = 7;
  cfg.optimizer.learning_rate = 5e-3;
  cfg.model.embedding_dim = 32;
  cfg.model.hidden_size = 16;
  return cfg;
}

inline std::string small_config_text(std::size_t epochs = 8) {
  return "epochs = " + std::to_string(epochs) +
         "\nbatch_size = 8\nseed = 7\nlearning_rate = 0.005\nembedding_dim = 32\nhidden_size = 16\n";
}

}  // namespace tqr::test
