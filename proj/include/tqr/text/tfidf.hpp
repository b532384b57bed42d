#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/text/token.hpp"

namespace tqr::text {

// Number of paragraphs containing each lowercase form.
struct DocumentFrequency {
  std::size_t n_paragraphs = 0;
  std::map<std::string, std::size_t> counts;

  std::size_t df(const std::string& lower) const {
    auto it = counts.find(lower);
    return it == counts.end() ? 0 : it->second;
  }

  // Adds one paragraph; each distinct form counts once.
  void add_paragraph(std::span<const Token> tokens) {
    std::set<std::string> seen;
    for (const auto& t : tokens) seen.insert(t.lower);
    for (const auto& w : seen) ++counts[w];
    ++n_paragraphs;
  }

  std::string to_tsv() const {
    std::ostringstream out;
    out << "#paragraphs\t" << n_paragraphs << '\n';
    for (const auto& [w, c] : counts) out << w << '\t' << c << '\n';
    return out.str();
  }

  static DocumentFrequency from_tsv(const std::string& tsv) {
    DocumentFrequency table;
    std::istringstream in(tsv);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
      ++lineno;
      auto tab = line.rfind('\t');
      if (tab == std::string::npos) throw InputError("document frequency line " + std::to_string(lineno) + ": missing tab");
      std::string key = line.substr(0, tab);
      std::size_t value = 0;
      try {
        value = std::stoul(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw InputError("document frequency line " + std::to_string(lineno) + ": bad count");
      }
      if (lineno == 1 && key == "#paragraphs") {
        table.n_paragraphs = value;
        header = true;
      } else {
        table.counts[key] = value;
      }
    }
    if (!header) throw InputError("document frequency table: missing #paragraphs header");
    return table;
  }
};

// tf = count / len, idf = ln(N / (1 + df)), tfidf = max(0, tf * idf).
inline std::vector<double> compute_tfidf(std::span<const Token> paragraph, const DocumentFrequency& table) {
  if (table.n_paragraphs == 0) throw ContractViolation("compute_tfidf: document frequency table covers 0 paragraphs");
  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& t : paragraph) ++tf[t.lower];
  std::vector<double> out;
  out.reserve(paragraph.size());
  const double len = static_cast<double>(paragraph.size());
  const double n = static_cast<double>(table.n_paragraphs);
  for (const auto& t : paragraph) {
    double term = static_cast<double>(tf[t.lower]) / len;
    double idf = std::log(n / (1.0 + static_cast<double>(table.df(t.lower))));
    out.push_back(std::max(0.0, term * idf));
  }
  return out;
}

}  // namespace tqr::text
