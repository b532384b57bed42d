#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tqr/text/lemmatizer.hpp"
#include "tqr/text/pos_tagger.hpp"
#include "tqr/text/temporal_ner.hpp"
#include "tqr/text/tfidf.hpp"
#include "tqr/text/tokenizer.hpp"

namespace tqr::text {

// Fills pos, lemma and ner on already tokenized text with the fallback tools.
inline void annotate(std::span<Token> tokens) {
  auto tags = pos_tag(std::span<const Token>(tokens.data(), tokens.size()));
  auto ner = temporal_ner(std::span<const Token>(tokens.data(), tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    tokens[i].pos = tags[i];
    tokens[i].ner = ner[i];
    tokens[i].lemma = lemmatize(tokens[i].text, tags[i]);
  }
}

inline std::vector<Token> tokenize_and_annotate(std::string_view text) {
  auto tokens = tokenize(text);
  annotate(tokens);
  return tokens;
}

inline void apply_tfidf(std::span<Token> tokens, const DocumentFrequency& table) {
  auto scores = compute_tfidf(std::span<const Token>(tokens.data(), tokens.size()), table);
  for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i].tfidf = scores[i];
}

}  // namespace tqr::text
