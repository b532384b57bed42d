#pragma once

#include <charconv>
#include <set>
#include <string>
#include <vector>

#include "tqr/corpus/dataset.hpp"
#include "tqr/corpus/types.hpp"

namespace tqr::corpus {

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t paragraphs = 0;
  std::size_t qa_pairs = 0;
  std::size_t timexes = 0;
  double timex_per_document = 0.0;
};

inline std::string fixed2(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline CorpusStats corpus_stats(const std::vector<Document>& documents) {
  CorpusStats s;
  s.documents = documents.size();
  for (const auto& d : documents) {
    s.paragraphs += d.paragraphs.size();
    for (const auto& p : d.paragraphs) s.timexes += p.timexes.size();
  }
  if (s.documents) s.timex_per_document = static_cast<double>(s.timexes) / static_cast<double>(s.documents);
  return s;
}

inline CorpusStats corpus_stats(const std::vector<QAExample>& examples) {
  CorpusStats s;
  std::set<std::string> docs;
  for (const auto& p : distinct_paragraphs(examples)) {
    docs.insert(p->doc_id);
    ++s.paragraphs;
    s.timexes += p->timexes.size();
  }
  s.documents = docs.size();
  s.qa_pairs = examples.size();
  if (s.documents) s.timex_per_document = static_cast<double>(s.timexes) / static_cast<double>(s.documents);
  return s;
}

inline std::string format_stats(const CorpusStats& s) {
  return "documents=" + std::to_string(s.documents) + " paragraphs=" + std::to_string(s.paragraphs) +
         " qa_pairs=" + std::to_string(s.qa_pairs) + " timexes=" + std::to_string(s.timexes) +
         " timex/doc=" + fixed2(s.timex_per_document);
}

}  // namespace tqr::corpus
