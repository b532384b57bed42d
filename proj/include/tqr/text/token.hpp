#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "tqr/error.hpp"

namespace tqr::text {

// Coarse part-of-speech tagset. The last five tags are reserved: the fallback
// tagger never emits them but gold annotations may.
enum class Pos : unsigned char {
  NOUN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PRT, PUNCT, X,
  PROPN, AUX, INTJ, SYM, SCONJ,
};
inline constexpr std::size_t kPosCount = 17;

enum class Ner : unsigned char { DATE, TIME, DURATION, CARDINAL, PERSON, LOC, ORG, O };
inline constexpr std::size_t kNerCount = 8;

inline constexpr std::array<std::string_view, kPosCount> kPosNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ",
    "PRT", "PUNCT", "X", "PROPN", "AUX", "INTJ", "SYM", "SCONJ"};

inline constexpr std::array<std::string_view, kNerCount> kNerNames = {
    "DATE", "TIME", "DURATION", "CARDINAL", "PERSON", "LOC", "ORG", "O"};

inline std::string_view to_string(Pos p) {
  auto i = static_cast<std::size_t>(p);
  if (i >= kPosCount) throw ContractViolation("unknown POS tag value " + std::to_string(i));
  return kPosNames[i];
}

inline std::string_view to_string(Ner n) {
  auto i = static_cast<std::size_t>(n);
  if (i >= kNerCount) throw ContractViolation("unknown NER tag value " + std::to_string(i));
  return kNerNames[i];
}

inline Pos parse_pos(std::string_view name) {
  for (std::size_t i = 0; i < kPosCount; ++i) {
    if (kPosNames[i] == name) return static_cast<Pos>(i);
  }
  throw InputError("unknown POS tag '" + std::string(name) + "'");
}

inline Ner parse_ner(std::string_view name) {
  for (std::size_t i = 0; i < kNerCount; ++i) {
    if (kNerNames[i] == name) return static_cast<Ner>(i);
  }
  throw InputError("unknown NER tag '" + std::string(name) + "'");
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Token {
  std::string text;
  std::string lower;
  std::string lemma;
  Pos pos = Pos::X;
  Ner ner = Ner::O;
  double tfidf = 0.0;
  std::size_t char_start = 0;  // byte offsets into the source text, [start, end)
  std::size_t char_end = 0;
};

}  // namespace tqr::text
