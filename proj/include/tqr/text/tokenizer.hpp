#pragma once

#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tqr/text/token.hpp"

namespace tqr::text {

namespace detail {
inline bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }
}  // namespace detail

// Splits on whitespace; every ASCII punctuation character is its own token.
// Bytes >= 0x80 count as word characters so UTF-8 sequences stay intact.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (detail::is_space_byte(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (detail::is_word_byte(c)) {
      while (i < text.size() && detail::is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++i;
    }
    Token t;
    t.text = std::string(text.substr(start, i - start));
    t.lower = to_lower(t.text);
    t.lemma = t.lower;
    t.char_start = start;
    t.char_end = i;
    out.push_back(std::move(t));
  }
  return out;
}

// Source substring covered by tokens[first..=last].
inline std::string detokenize(std::string_view source, std::span<const Token> tokens, std::size_t first, std::size_t last) {
  if (first > last || last >= tokens.size()) {
    throw ContractViolation("detokenize: span [" + std::to_string(first) + ", " + std::to_string(last) +
                            "] outside " + std::to_string(tokens.size()) + " tokens");
  }
  return std::string(source.substr(tokens[first].char_start, tokens[last].char_end - tokens[first].char_start));
}

// Rebuilds the source from token slices plus the gaps between them.
inline std::string reconstruct(std::string_view source, std::span<const Token> tokens) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& t : tokens) {
    out.append(source.substr(cursor, t.char_start - cursor));
    out.append(t.text);
    cursor = t.char_end;
  }
  out.append(source.substr(cursor));
  return out;
}

}  // namespace tqr::text
