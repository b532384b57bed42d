#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tqr/text/token.hpp"

namespace tqr::corpus {

// Temporal expression span, byte offsets into its paragraph's text.
struct TimexSpan {
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string text;
  std::optional<std::string> val;  // TIMEX2 value attribute, carried verbatim

  friend bool operator==(const TimexSpan&, const TimexSpan&) = default;
};

struct Paragraph {
  std::string doc_id;
  std::string para_id;
  std::string text;
  std::vector<TimexSpan> timexes;
  std::vector<text::Token> tokens;
};

struct Document {
  std::string doc_id;
  std::vector<Paragraph> paragraphs;
};

struct QAExample {
  std::shared_ptr<const Paragraph> paragraph;
  std::string question_text;
  std::vector<text::Token> question_tokens;
  std::size_t answer_start = 0;  // inclusive token indices into paragraph->tokens
  std::size_t answer_end = 0;
  std::string answer_text;
};

struct DatasetSplit {
  std::vector<QAExample> train;
  std::vector<QAExample> dev;
  std::vector<QAExample> test;
  std::uint64_t seed = 0;
};

inline std::string paragraph_key(const Paragraph& p) { return p.doc_id + '/' + p.para_id; }

}  // namespace tqr::corpus
