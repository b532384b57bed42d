#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/dataset.hpp"
#include "tqr/error.hpp"
#include "tqr/nn/checkpoint.hpp"
#include "tqr/reader/embedding.hpp"
#include "tqr/reader/model.hpp"
#include "tqr/text/tfidf.hpp"
#include "tqr/training/config.hpp"
#include "tqr/training/train.hpp"

namespace tqr::training {

inline constexpr const char* kCheckpointFile = "model.ckpt";
inline constexpr const char* kEmbeddingsFile = "embeddings.txt";
inline constexpr const char* kDocumentFrequencyFile = "df.tsv";

// Everything needed to answer questions: learned parameters plus the frozen
// embedding table and the training-split document frequencies.
struct TrainedModel {
  reader::ModelConfig config;
  nn::ParameterStore<float> params;
  reader::EmbeddingTable embeddings;
  text::DocumentFrequency df;
};

inline void save_model_checkpoint(const std::filesystem::path& path, const nn::ParameterStore<float>& params,
                                  const reader::ModelConfig& config,
                                  nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json meta;
  meta["model"] = config.to_json();
  for (auto& [k, v] : extra.items()) meta[k] = v;
  nn::save_checkpoint(params, path, meta);
}

// Writes model.ckpt, embeddings.txt and df.tsv into `dir`.
inline void save_model(const std::filesystem::path& dir, const TrainedModel& model,
                       const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
  std::filesystem::create_directories(dir);
  save_model_checkpoint(dir / kCheckpointFile, model.params, model.config, extra);
  model.embeddings.save(dir / kEmbeddingsFile);
  corpus::write_file(dir / kDocumentFrequencyFile, model.df.to_tsv());
}

// Loads a checkpoint and its sibling embedding and document-frequency files.
inline TrainedModel load_model(const std::filesystem::path& checkpoint) {
  nn::Checkpoint ckpt = nn::load_checkpoint(checkpoint);
  if (!ckpt.metadata.contains("model")) throw InputError(checkpoint.string() + ": no model configuration in metadata");
  TrainedModel model;
  model.config = reader::ModelConfig::from_json(ckpt.metadata["model"]);
  reader::check_params(ckpt.params, model.config);
  model.params = std::move(ckpt.params);
  const auto dir = checkpoint.parent_path();
  model.embeddings = reader::EmbeddingTable::load_glove(dir / kEmbeddingsFile, model.config.embedding_dim);
  model.df = text::DocumentFrequency::from_tsv(corpus::read_file(dir / kDocumentFrequencyFile));
  return model;
}

// Lowercase forms of every paragraph and question token.
inline std::set<std::string> vocabulary(const std::vector<const std::vector<corpus::QAExample>*>& parts) {
  std::set<std::string> words;
  for (const auto* part : parts) {
    for (const auto& ex : *part) {
      for (const auto& t : ex.paragraph->tokens) words.insert(t.lower);
      for (const auto& t : ex.question_tokens) words.insert(t.lower);
    }
  }
  return words;
}

inline reader::EmbeddingTable build_embeddings(const corpus::DatasetSplit& split, const TrainConfig& cfg) {
  auto words = vocabulary({&split.train, &split.dev, &split.test});
  if (cfg.embeddings.empty()) return reader::EmbeddingTable::random(words, cfg.model.embedding_dim, cfg.seed);
  return reader::EmbeddingTable::load_glove(cfg.embeddings, cfg.model.embedding_dim, &words);
}

// Model inputs for one split: tf-idf from the training frequencies, then
// embeddings and static features.
inline std::vector<reader::ExampleInputs> prepare_inputs(const std::vector<corpus::QAExample>& examples,
                                                         const reader::EmbeddingTable& table,
                                                         const text::DocumentFrequency& df) {
  if (examples.empty()) return {};
  return reader::make_inputs(corpus::with_tfidf(examples, df), table);
}

struct PreparedData {
  reader::EmbeddingTable embeddings;
  text::DocumentFrequency df;
  std::vector<reader::ExampleInputs> train;
  std::vector<reader::ExampleInputs> dev;
  std::vector<reader::ExampleInputs> test;
};

inline PreparedData prepare_data(const corpus::DatasetSplit& split, const TrainConfig& cfg) {
  if (split.train.empty()) throw InputError("training split is empty");
  PreparedData data;
  data.embeddings = build_embeddings(split, cfg);
  data.df = corpus::document_frequency(split.train);
  data.train = prepare_inputs(split.train, data.embeddings, data.df);
  data.dev = prepare_inputs(split.dev, data.embeddings, data.df);
  data.test = prepare_inputs(split.test, data.embeddings, data.df);
  return data;
}

}  // namespace tqr::training
