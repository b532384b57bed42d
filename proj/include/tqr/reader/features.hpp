#pragma once

#include <array>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/tensor.hpp"
#include "tqr/text/token.hpp"

namespace tqr::reader {

// Feature groups that can be switched off for ablations. Disabled groups
// become zero blocks of unchanged width.
struct FeatureMask {
  bool use_exact_match = true;
  bool use_pos = true;
  bool use_ner = true;
  bool use_tfidf = true;
  bool use_aligned = true;

  static FeatureMask all() { return {}; }
  static FeatureMask none() { return {false, false, false, false, false}; }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

inline constexpr std::array<const char*, 5> kFeatureGroups = {"exact_match", "pos", "ner", "tfidf", "aligned"};

// Comma-separated enabled groups; "all" and "none" are accepted, and "-" is
// a synonym for none.
inline std::string to_string(const FeatureMask& m) {
  const bool on[] = {m.use_exact_match, m.use_pos, m.use_ner, m.use_tfidf, m.use_aligned};
  std::string out;
  for (std::size_t i = 0; i < kFeatureGroups.size(); ++i) {
    if (!on[i]) continue;
    if (!out.empty()) out += ',';
    out += kFeatureGroups[i];
  }
  return out.empty() ? "none" : out;
}

inline FeatureMask parse_feature_mask(const std::string& spec) {
  if (spec == "all") return FeatureMask::all();
  FeatureMask m = FeatureMask::none();
  if (spec == "none" || spec == "-" || spec.empty()) return m;
  std::istringstream in(spec);
  std::string item;
  std::set<std::string> seen;
  while (std::getline(in, item, ',')) {
    auto b = item.find_first_not_of(' ');
    auto e = item.find_last_not_of(' ');
    item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    if (!seen.insert(item).second) throw InputError("feature group '" + item + "' listed twice");
    if (item == "exact_match") m.use_exact_match = true;
    else if (item == "pos") m.use_pos = true;
    else if (item == "ner") m.use_ner = true;
    else if (item == "tfidf") m.use_tfidf = true;
    else if (item == "aligned") m.use_aligned = true;
    else throw InputError("unknown feature group '" + item + "'");
  }
  return m;
}

inline constexpr std::size_t kExactMatchWidth = 2;
inline constexpr std::size_t kTokenFeatureWidth = text::kPosCount + text::kNerCount + 1;
inline constexpr std::size_t kStaticWidth = kExactMatchWidth + kTokenFeatureWidth;

// Column offsets inside the static feature block.
inline constexpr std::size_t kPosOffset = kExactMatchWidth;
inline constexpr std::size_t kNerOffset = kPosOffset + text::kPosCount;
inline constexpr std::size_t kTfidfOffset = kNerOffset + text::kNerCount;

// [lowercase match, lemma match] per paragraph token.
inline std::vector<std::array<float, 2>> exact_match_features(std::span<const text::Token> paragraph,
                                                              std::span<const text::Token> question) {
  std::set<std::string> lowers, lemmas;
  for (const auto& q : question) {
    lowers.insert(q.lower);
    lemmas.insert(q.lemma);
  }
  std::vector<std::array<float, 2>> out;
  out.reserve(paragraph.size());
  for (const auto& p : paragraph) {
    out.push_back({lowers.count(p.lower) ? 1.0f : 0.0f, lemmas.count(p.lemma) ? 1.0f : 0.0f});
  }
  return out;
}

// One-hot POS, one-hot NER, then the tf-idf scalar.
inline std::array<float, kTokenFeatureWidth> token_features(const text::Token& token, const FeatureMask& mask = {}) {
  std::array<float, kTokenFeatureWidth> out{};
  auto pos = static_cast<std::size_t>(token.pos);
  auto ner = static_cast<std::size_t>(token.ner);
  if (pos >= text::kPosCount) throw InputError("token '" + token.text + "': unknown POS tag " + std::to_string(pos));
  if (ner >= text::kNerCount) throw InputError("token '" + token.text + "': unknown NER tag " + std::to_string(ner));
  if (mask.use_pos) out[pos] = 1.0f;
  if (mask.use_ner) out[text::kPosCount + ner] = 1.0f;
  if (mask.use_tfidf) out[text::kPosCount + text::kNerCount] = static_cast<float>(token.tfidf);
  return out;
}

// Exact-match and token features for every paragraph token, [m x 28].
inline nn::Tensor<float> static_features(std::span<const text::Token> paragraph, std::span<const text::Token> question,
                                         const FeatureMask& mask = {}) {
  nn::Tensor<float> out(nn::Shape{paragraph.size(), kStaticWidth});
  auto em = exact_match_features(paragraph, question);
  for (std::size_t i = 0; i < paragraph.size(); ++i) {
    auto row = out.row(i);
    if (mask.use_exact_match) {
      row[0] = em[i][0];
      row[1] = em[i][1];
    }
    auto tf = token_features(paragraph[i], mask);
    std::copy(tf.begin(), tf.end(), row.begin() + kExactMatchWidth);
  }
  return out;
}

// Zeroes the disabled groups of an unmasked static feature matrix.
template <typename T>
void apply_mask(nn::Tensor<T>& features, const FeatureMask& mask) {
  for (std::size_t i = 0; i < features.rows(); ++i) {
    auto row = features.row(i);
    if (!mask.use_exact_match) std::fill(row.begin(), row.begin() + kPosOffset, T(0));
    if (!mask.use_pos) std::fill(row.begin() + kPosOffset, row.begin() + kNerOffset, T(0));
    if (!mask.use_ner) std::fill(row.begin() + kNerOffset, row.begin() + kTfidfOffset, T(0));
    if (!mask.use_tfidf) row[kTfidfOffset] = T(0);
  }
}

}  // namespace tqr::reader
