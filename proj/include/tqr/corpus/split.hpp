#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/dataset.hpp"
#include "tqr/error.hpp"
#include "tqr/nn/random.hpp"

namespace tqr::corpus {

// Paragraph-level 80/10/10 split. Paragraphs are shuffled with the seed; dev
// and test each take floor(n/10) paragraphs and train keeps the rest.
inline DatasetSplit split_dataset(const std::vector<QAExample>& examples, std::uint64_t seed) {
  std::vector<std::string> keys;
  for (const auto& p : distinct_paragraphs(examples)) keys.push_back(paragraph_key(*p));
  if (keys.size() < 10) {
    throw InputError("split needs at least 10 distinct paragraphs, got " + std::to_string(keys.size()));
  }
  nn::Rng rng(seed);
  rng.shuffle(keys);
  const std::size_t n_held = keys.size() / 10;
  const std::size_t n_train = keys.size() - 2 * n_held;
  std::map<std::string, int> part;
  for (std::size_t i = 0; i < keys.size(); ++i) part[keys[i]] = i < n_train ? 0 : (i < n_train + n_held ? 1 : 2);

  DatasetSplit split;
  split.seed = seed;
  for (const auto& ex : examples) {
    switch (part.at(paragraph_key(*ex.paragraph))) {
      case 0: split.train.push_back(ex); break;
      case 1: split.dev.push_back(ex); break;
      default: split.test.push_back(ex); break;
    }
  }
  return split;
}

inline Json split_manifest(const DatasetSplit& split) {
  Json m;
  m["seed"] = split.seed;
  auto describe = [](const std::vector<QAExample>& part) {
    Json d;
    Json keys = Json::array();
    for (const auto& p : distinct_paragraphs(part)) keys.push_back(paragraph_key(*p));
    d["paragraphs"] = keys.size();
    d["examples"] = part.size();
    d["paragraph_ids"] = std::move(keys);
    return d;
  };
  m["train"] = describe(split.train);
  m["dev"] = describe(split.dev);
  m["test"] = describe(split.test);
  return m;
}

// Writes train.jsonl, dev.jsonl, test.jsonl and split_manifest.json.
inline void write_split(const DatasetSplit& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_dataset(dir / "train.jsonl", split.train);
  save_dataset(dir / "dev.jsonl", split.dev);
  save_dataset(dir / "test.jsonl", split.test);
  write_file(dir / "split_manifest.json", split_manifest(split).dump(2) + "\n");
}

// Reads a materialized split; a missing dev or test file counts as empty.
inline DatasetSplit read_split(const std::filesystem::path& dir) {
  DatasetSplit split;
  if (!std::filesystem::exists(dir / "train.jsonl")) throw InputError("no train.jsonl in " + dir.string());
  split.train = load_dataset(dir / "train.jsonl");
  if (std::filesystem::exists(dir / "dev.jsonl")) split.dev = load_dataset(dir / "dev.jsonl");
  if (std::filesystem::exists(dir / "test.jsonl")) split.test = load_dataset(dir / "test.jsonl");
  if (std::filesystem::exists(dir / "split_manifest.json")) {
    try {
      split.seed = Json::parse(read_file(dir / "split_manifest.json")).at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError((dir / "split_manifest.json").string() + ": " + e.what());
    }
  }
  return split;
}

}  // namespace tqr::corpus
