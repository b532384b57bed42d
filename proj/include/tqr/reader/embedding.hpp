#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/random.hpp"
#include "tqr/nn/tensor.hpp"
#include "tqr/text/token.hpp"

namespace tqr::reader {

inline constexpr std::string_view kUnkWord = "<unk>";

// Frozen word vectors. Lookup is lowercase; misses map to the <unk> row.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  EmbeddingTable(std::vector<std::string> words, nn::Tensor<float> matrix) : words_(std::move(words)), matrix_(std::move(matrix)) {
    if (matrix_.rank() != 2 || matrix_.rows() != words_.size()) {
      throw ContractViolation("embedding table: " + std::to_string(words_.size()) + " words for matrix " +
                              nn::shape_string(matrix_.shape()));
    }
    for (std::size_t i = 0; i < words_.size(); ++i) vocab_.emplace(words_[i], i);
    auto it = vocab_.find(std::string(kUnkWord));
    if (it == vocab_.end()) throw ContractViolation("embedding table: no <unk> row");
    unk_ = it->second;
  }

  std::size_t dim() const { return matrix_.cols(); }
  std::size_t rows() const { return words_.size(); }
  std::size_t unk_index() const { return unk_; }
  const std::vector<std::string>& words() const { return words_; }
  const nn::Tensor<float>& matrix() const { return matrix_; }

  std::size_t index(std::string_view word) const {
    auto it = vocab_.find(text::to_lower(word));
    return it == vocab_.end() ? unk_ : it->second;
  }

  std::span<const float> vector(std::string_view word) const { return matrix_.row(index(word)); }

  // One row per token.
  nn::Tensor<float> embed(std::span<const text::Token> tokens) const {
    nn::Tensor<float> out(nn::Shape{tokens.size(), dim()});
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto src = matrix_.row(index(tokens[i].lower));
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  // Deterministic pseudo-random vectors: each word's row depends only on the
  // word and the seed, never on vocabulary order.
  static EmbeddingTable random(const std::set<std::string>& vocabulary, std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw ContractViolation("embedding dimension must be positive");
    std::vector<std::string> words(vocabulary.begin(), vocabulary.end());
    if (!vocabulary.count(std::string(kUnkWord))) words.emplace_back(kUnkWord);
    nn::Tensor<float> m(nn::Shape{words.size(), dim});
    const double bound = std::sqrt(3.0 / static_cast<double>(dim));
    for (std::size_t i = 0; i < words.size(); ++i) {
      nn::Rng rng(nn::fnv1a(words[i], 0xcbf29ce484222325ULL ^ seed));
      for (auto& v : m.row(i)) v = static_cast<float>(rng.uniform(-bound, bound));
    }
    return EmbeddingTable(std::move(words), std::move(m));
  }

  // GloVe text format: a word then `dim` floats per line. The dimension is
  // taken from the first row unless given. When `keep` is set only those
  // (lowercased) words are retained. A zero <unk> row is appended if the file
  // has none.
  static EmbeddingTable load_glove(const std::filesystem::path& path, std::optional<std::size_t> expected_dim = {},
                                   const std::set<std::string>* keep = nullptr) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read embeddings " + path.string());
    std::vector<std::string> words;
    std::vector<float> data;
    std::set<std::string> seen;
    std::optional<std::size_t> dim = expected_dim;
    std::string line;
    std::size_t lineno = 0;
    std::vector<float> row;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::string where = path.string() + ":" + std::to_string(lineno);
      auto space = line.find(' ');
      if (space == std::string::npos || space == 0) throw InputError(where + ": expected a word followed by values");
      std::string word = text::to_lower(std::string_view(line).substr(0, space));
      row.clear();
      const char* p = line.data() + space;
      const char* end = line.data() + line.size();
      while (p < end) {
        while (p < end && *p == ' ') ++p;
        if (p == end) break;
        float v = 0;
        auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc() || (res.ptr != end && *res.ptr != ' ')) {
          throw InputError(where + ": malformed value in column " + std::to_string(row.size() + 2));
        }
        if (!std::isfinite(v)) throw InputError(where + ": non-finite value");
        row.push_back(v);
        p = res.ptr;
      }
      if (!dim) dim = row.size();
      if (row.size() != *dim || *dim == 0) {
        throw InputError(where + ": expected " + std::to_string(*dim) + " values, got " + std::to_string(row.size()));
      }
      if (keep && !keep->count(word) && word != kUnkWord) continue;
      if (!seen.insert(word).second) continue;
      words.push_back(word);
      data.insert(data.end(), row.begin(), row.end());
    }
    if (!dim) throw InputError(path.string() + ": no embedding rows");
    if (!seen.count(std::string(kUnkWord))) {
      words.emplace_back(kUnkWord);
      data.insert(data.end(), *dim, 0.0f);
    }
    nn::Tensor<float> m(nn::Shape{words.size(), *dim}, std::move(data));
    return EmbeddingTable(std::move(words), std::move(m));
  }

  // Writes GloVe text with shortest round-trip float formatting, so a
  // save/load cycle is exact.
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    char buf[32];
    std::string line;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      line = words_[i];
      for (float v : matrix_.row(i)) {
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        line.push_back(' ');
        line.append(buf, res.ptr);
      }
      line.push_back('\n');
      out << line;
    }
    if (!out) throw InputError("failed writing " + path.string());
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> vocab_;
  nn::Tensor<float> matrix_;
  std::size_t unk_ = 0;
};

}  // namespace tqr::reader
