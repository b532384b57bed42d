#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tqr/default_data.hpp"
#include "tqr/error.hpp"
#include "tqr/text/token.hpp"
#include "tqr/text/tokenizer.hpp"

namespace tqr::text {

enum class TimexKind { absolute, deictic, anaphoric };

inline std::string_view to_string(TimexKind k) {
  switch (k) {
    case TimexKind::absolute: return "absolute";
    case TimexKind::deictic: return "deictic";
    case TimexKind::anaphoric: return "anaphoric";
  }
  return "?";
}

inline TimexKind parse_timex_kind(std::string_view s) {
  if (s == "absolute") return TimexKind::absolute;
  if (s == "deictic") return TimexKind::deictic;
  if (s == "anaphoric") return TimexKind::anaphoric;
  throw InputError("unknown timex kind '" + std::string(s) + "'");
}

enum class WordClass { MONTH, WEEKDAY, SEASON, DAYPART, UNIT, COUNT, DAYNUM, ORDINAL, DECADE };

namespace detail {

inline bool all_digits(std::string_view w) {
  return !w.empty() && w.size() <= 9 &&
         std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

inline long digits_value(std::string_view w) {
  long v = 0;
  std::from_chars(w.data(), w.data() + w.size(), v);
  return v;
}

inline bool in_set(std::string_view w, std::initializer_list<std::string_view> words) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

inline bool is_number_word(std::string_view w) {
  return in_set(w, {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
                    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
                    "twenty", "thirty", "forty", "fifty", "sixty", "hundred", "several", "many", "few", "some",
                    "a", "an"});
}

// Digits followed by st/nd/rd/th; returns the numeric part or -1.
inline long digit_ordinal(std::string_view w) {
  if (w.size() < 3) return -1;
  std::string_view suffix = w.substr(w.size() - 2);
  if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return -1;
  std::string_view num = w.substr(0, w.size() - 2);
  return all_digits(num) ? digits_value(num) : -1;
}

inline bool word_class_matches(WordClass wc, std::string_view w) {
  switch (wc) {
    case WordClass::MONTH:
      return in_set(w, {"january", "february", "march", "april", "may", "june", "july", "august", "september",
                        "october", "november", "december"});
    case WordClass::WEEKDAY:
      return in_set(w, {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"});
    case WordClass::SEASON:
      return in_set(w, {"spring", "summer", "autumn", "fall", "winter"});
    case WordClass::DAYPART:
      return in_set(w, {"morning", "afternoon", "evening", "night"});
    case WordClass::UNIT:
      return in_set(w, {"second", "seconds", "minute", "minutes", "hour", "hours", "day", "days", "night",
                        "nights", "week", "weeks", "weekend", "weekends", "fortnight", "fortnights", "month",
                        "months", "year", "years", "decade", "decades", "century", "centuries"});
    case WordClass::COUNT:
      if (all_digits(w)) {
        long v = digits_value(w);
        return v >= 1 && v <= 999;
      }
      return is_number_word(w);
    case WordClass::DAYNUM: {
      long v = all_digits(w) ? digits_value(w) : digit_ordinal(w);
      return v >= 1 && v <= 31;
    }
    case WordClass::ORDINAL:
      return digit_ordinal(w) >= 0 ||
             in_set(w, {"first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth",
                        "tenth", "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth", "sixteenth",
                        "seventeenth", "eighteenth", "nineteenth", "twentieth", "twenty-first"});
    case WordClass::DECADE: {
      if (w.size() != 5 || w.back() != 's') return false;
      std::string_view num = w.substr(0, 4);
      if (!all_digits(num)) return false;
      long v = digits_value(num);
      return v >= 1000 && v <= 2999;
    }
  }
  return false;
}

inline WordClass parse_word_class(std::string_view name) {
  static const std::pair<std::string_view, WordClass> table[] = {
      {"MONTH", WordClass::MONTH}, {"WEEKDAY", WordClass::WEEKDAY}, {"SEASON", WordClass::SEASON},
      {"DAYPART", WordClass::DAYPART}, {"UNIT", WordClass::UNIT}, {"COUNT", WordClass::COUNT},
      {"DAYNUM", WordClass::DAYNUM}, {"ORDINAL", WordClass::ORDINAL}, {"DECADE", WordClass::DECADE}};
  for (const auto& [n, wc] : table) {
    if (n == name) return wc;
  }
  throw InputError("unknown word class <" + std::string(name) + ">");
}

}  // namespace detail

// One alternative inside a pattern element.
struct PatternAtom {
  enum class Type { literal, word_class, range } type = Type::literal;
  std::string literal;
  WordClass word_class = WordClass::MONTH;
  long lo = 0, hi = 0;

  bool matches(std::string_view lower) const {
    switch (type) {
      case Type::literal: return lower == literal;
      case Type::word_class: return detail::word_class_matches(word_class, lower);
      case Type::range: {
        if (!detail::all_digits(lower)) return false;
        long v = detail::digits_value(lower);
        return v >= lo && v <= hi;
      }
    }
    return false;
  }
};

struct PatternElement {
  std::vector<PatternAtom> alternatives;
  bool optional = false;

  bool matches(std::string_view lower) const {
    return std::any_of(alternatives.begin(), alternatives.end(), [&](const auto& a) { return a.matches(lower); });
  }
};

struct TemporalPattern {
  std::string name;
  TimexKind kind = TimexKind::absolute;
  Ner tag = Ner::DATE;
  std::string source;
  std::vector<PatternElement> elements;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;

  // All token counts n > 0 such that the pattern matches tokens[start, start+n).
  std::set<std::size_t> match_lengths(std::span<const Token> tokens, std::size_t start) const {
    std::set<std::size_t> ends;
    collect(tokens, 0, start, ends);
    std::set<std::size_t> lengths;
    for (std::size_t e : ends) {
      if (e > start) lengths.insert(e - start);
    }
    return lengths;
  }

  bool full_match(std::span<const Token> tokens) const {
    return !tokens.empty() && match_lengths(tokens, 0).count(tokens.size()) > 0;
  }

  static PatternElement parse_element(std::string_view text) {
    PatternElement el;
    if (text.size() > 1 && text.back() == '?') {
      el.optional = true;
      text.remove_suffix(1);
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t bar = text.find('|', pos);
      if (bar == std::string_view::npos) bar = text.size();
      std::string_view alt = text.substr(pos, bar - pos);
      if (alt.empty()) throw InputError("empty alternative in pattern element '" + std::string(text) + "'");
      PatternAtom atom;
      if (alt.size() > 2 && alt.front() == '<' && alt.back() == '>') {
        atom.type = PatternAtom::Type::word_class;
        atom.word_class = detail::parse_word_class(alt.substr(1, alt.size() - 2));
      } else if (alt.size() > 1 && alt.front() == '#') {
        auto dash = alt.find('-', 1);
        if (dash == std::string_view::npos) throw InputError("bad numeric range '" + std::string(alt) + "'");
        atom.type = PatternAtom::Type::range;
        std::string_view lo = alt.substr(1, dash - 1), hi = alt.substr(dash + 1);
        if (!detail::all_digits(lo) || !detail::all_digits(hi)) {
          throw InputError("bad numeric range '" + std::string(alt) + "'");
        }
        atom.lo = detail::digits_value(lo);
        atom.hi = detail::digits_value(hi);
      } else {
        atom.literal = to_lower(alt);
      }
      el.alternatives.push_back(std::move(atom));
      pos = bar + 1;
    }
    return el;
  }

 private:
  void collect(std::span<const Token> tokens, std::size_t elem, std::size_t pos, std::set<std::size_t>& ends) const {
    if (elem == elements.size()) {
      ends.insert(pos);
      return;
    }
    const auto& el = elements[elem];
    if (el.optional) collect(tokens, elem + 1, pos, ends);
    if (pos < tokens.size() && el.matches(tokens[pos].lower)) collect(tokens, elem + 1, pos + 1, ends);
  }
};

struct TimexMatch {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t pattern = 0;  // index into the pattern set
};

class PatternSet {
 public:
  static PatternSet from_tsv(std::string_view tsv) {
    PatternSet set;
    std::istringstream in{std::string(tsv)};
    std::string line;
    std::size_t lineno = 0;
    std::unordered_set<std::string> names;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::size_t pos = 0;
      while (true) {
        auto tab = line.find('\t', pos);
        cols.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
      }
      auto fail = [&](const std::string& msg) {
        return InputError("temporal patterns line " + std::to_string(lineno) + ": " + msg);
      };
      if (cols.size() < 4 || cols.size() > 6) throw fail("expected 4 to 6 tab-separated columns");
      TemporalPattern p;
      p.name = cols[0];
      if (!names.insert(p.name).second) throw fail("duplicate pattern name '" + p.name + "'");
      try {
        p.kind = parse_timex_kind(cols[1]);
        p.tag = parse_ner(cols[2]);
        p.source = cols[3];
        std::istringstream elems(cols[3]);
        std::string e;
        while (elems >> e) p.elements.push_back(TemporalPattern::parse_element(e));
      } catch (const InputError& e) {
        throw fail(e.what());
      }
      if (p.elements.empty()) throw fail("empty pattern");
      if (cols.size() > 4) p.positives = split_examples(cols[4]);
      if (cols.size() > 5) p.negatives = split_examples(cols[5]);
      set.patterns_.push_back(std::move(p));
    }
    return set;
  }

  static const PatternSet& default_set() {
    static const PatternSet set = from_tsv(data::kTemporalPatterns);
    return set;
  }

  const std::vector<TemporalPattern>& patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }

  // Names of patterns failing their own positive or negative examples.
  std::vector<std::string> self_test_failures() const {
    std::vector<std::string> failures;
    for (const auto& p : patterns_) {
      for (const auto& ex : p.positives) {
        if (!p.full_match(tokenize(ex))) failures.push_back(p.name + " rejects '" + ex + "'");
      }
      for (const auto& ex : p.negatives) {
        if (p.full_match(tokenize(ex))) failures.push_back(p.name + " accepts '" + ex + "'");
      }
      if (p.positives.empty()) failures.push_back(p.name + " has no positive examples");
    }
    return failures;
  }

  // Leftmost-longest scan; ties on length go to the earlier pattern.
  std::vector<TimexMatch> find(std::span<const Token> tokens) const {
    std::vector<TimexMatch> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
      TimexMatch best;
      for (std::size_t p = 0; p < patterns_.size(); ++p) {
        auto lengths = patterns_[p].match_lengths(tokens, i);
        if (!lengths.empty() && *lengths.rbegin() > best.length) {
          best = TimexMatch{i, *lengths.rbegin(), p};
        }
      }
      if (best.length == 0) {
        ++i;
        continue;
      }
      out.push_back(best);
      i += best.length;
    }
    return out;
  }

 private:
  static std::vector<std::string> split_examples(const std::string& col) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= col.size()) {
      auto sep = col.find(" ; ", pos);
      std::string item = col.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos);
      auto b = item.find_first_not_of(' ');
      auto e = item.find_last_not_of(' ');
      if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
      if (sep == std::string::npos) break;
      pos = sep + 3;
    }
    return out;
  }

  std::vector<TemporalPattern> patterns_;
};

// Per-token tags: tokens inside a match take the pattern's tag, others O.
inline std::vector<Ner> temporal_ner(std::span<const Token> tokens, const PatternSet& patterns = PatternSet::default_set()) {
  std::vector<Ner> tags(tokens.size(), Ner::O);
  for (const auto& m : patterns.find(tokens)) {
    for (std::size_t k = 0; k < m.length; ++k) tags[m.start + k] = patterns.patterns()[m.pattern].tag;
  }
  return tags;
}

}  // namespace tqr::text
