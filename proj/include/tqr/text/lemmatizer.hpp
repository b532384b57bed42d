#pragma once

#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "tqr/default_data.hpp"
#include "tqr/error.hpp"
#include "tqr/text/token.hpp"

namespace tqr::text {

// Rule-based lemmatizer: lowercasing, an exception lexicon, then ordered
// suffix rules. Rules are applied until nothing changes, so the output is a
// fixed point and lemmatize(lemmatize(w)) == lemmatize(w).
class Lemmatizer {
 public:
  Lemmatizer() = default;

  // Parses "surface<TAB>lemma" lines; '#' starts a comment line.
  static Lemmatizer from_tsv(std::string_view tsv) {
    Lemmatizer lem;
    std::istringstream in{std::string(tsv)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
        throw InputError("lemma exceptions line " + std::to_string(lineno) + ": expected surface<TAB>lemma");
      }
      lem.exceptions_[to_lower(line.substr(0, tab))] = to_lower(line.substr(tab + 1));
    }
    return lem;
  }

  static const Lemmatizer& default_instance() {
    static const Lemmatizer lem = from_tsv(data::kLemmaExceptions);
    return lem;
  }

  std::size_t exception_count() const { return exceptions_.size(); }

  std::string lemmatize(std::string_view token, Pos pos) const {
    std::string w = to_lower(token);
    if (w.empty()) return w;
    for (int round = 0; round < 8; ++round) {
      if (auto it = exceptions_.find(w); it != exceptions_.end()) {
        if (it->second == w) break;
        w = it->second;
        continue;
      }
      if (!open_class(pos)) break;
      std::string next = apply_rules(w, pos);
      if (next == w) break;
      w = std::move(next);
    }
    return w;
  }

 private:
  static bool open_class(Pos pos) {
    switch (pos) {
      case Pos::NOUN:
      case Pos::VERB:
      case Pos::X:
        return true;
      default:
        return false;
    }
  }

  static bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
  }

  static bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

  static bool has_vowel(std::string_view w) {
    for (char c : w) {
      if (is_vowel(c) || c == 'y') return true;
    }
    return false;
  }

  // Repairs a stem left by stripping -ed / -ing.
  static std::string fix_stem(std::string stem) {
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) && stem[n - 1] != 'l' &&
        stem[n - 1] != 's' && stem[n - 1] != 'z') {
      stem.pop_back();
      return stem;
    }
    if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz") || ends_with(stem, "is") ||
        ends_with(stem, "v") || ends_with(stem, "u") || (n >= 2 && stem[n - 1] == 'c' && !is_vowel(stem[n - 2]))) {
      return stem + "e";
    }
    if (n == 3 && !is_vowel(stem[0]) && is_vowel(stem[1]) && !is_vowel(stem[2]) && stem[2] != 'w' &&
        stem[2] != 'x' && stem[2] != 'y') {
      return stem + "e";
    }
    return stem;
  }

  static std::string apply_rules(const std::string& w, Pos pos) {
    const bool verbal = pos == Pos::VERB || pos == Pos::X;
    if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (verbal && ends_with(w, "ied") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "es") && w.size() > 3) {
      std::string stem = w.substr(0, w.size() - 2);
      if (ends_with(stem, "ss") || ends_with(stem, "x") || ends_with(stem, "z") || ends_with(stem, "ch") ||
          ends_with(stem, "sh")) {
        return stem;
      }
    }
    if (ends_with(w, "s") && w.size() >= 4 && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
      return w.substr(0, w.size() - 1);
    }
    if (!verbal) return w;
    if (ends_with(w, "eed") && w.size() >= 5) return w.substr(0, w.size() - 1);
    if (ends_with(w, "ed") && w.size() >= 5) {
      std::string stem = w.substr(0, w.size() - 2);
      if (has_vowel(stem)) return fix_stem(std::move(stem));
    }
    if (ends_with(w, "ing") && w.size() >= 6) {
      std::string stem = w.substr(0, w.size() - 3);
      if (has_vowel(stem)) return fix_stem(std::move(stem));
    }
    return w;
  }

  std::unordered_map<std::string, std::string> exceptions_;
};

inline std::string lemmatize(std::string_view token, Pos pos) {
  return Lemmatizer::default_instance().lemmatize(token, pos);
}

}  // namespace tqr::text
