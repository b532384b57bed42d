#pragma once

#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tqr/text/token.hpp"

namespace tqr::text {

namespace detail {

inline const std::unordered_map<std::string, Pos>& closed_class_lexicon() {
  static const std::unordered_map<std::string, Pos> lexicon = [] {
    std::unordered_map<std::string, Pos> m;
    auto put = [&m](Pos p, std::initializer_list<const char*> words) {
      for (const char* w : words) m.emplace(w, p);
    };
    put(Pos::DET, {"the", "a", "an", "this", "that", "these", "those", "each", "every", "some", "any", "no",
                   "all", "both", "another", "either", "neither", "such"});
    put(Pos::PRON, {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "his",
                    "its", "our", "their", "my", "your", "who", "whom", "whose", "which", "what", "himself",
                    "herself", "itself", "themselves", "ourselves", "myself", "one's", "someone", "nobody"});
    put(Pos::ADP, {"of", "in", "on", "at", "by", "for", "with", "from", "into", "onto", "during", "after",
                   "before", "since", "until", "till", "against", "between", "through", "under", "over",
                   "about", "near", "across", "without", "within", "upon", "toward", "towards", "among",
                   "amongst", "behind", "beyond", "despite", "via", "amid", "throughout", "along", "around",
                   "above", "below", "beside", "besides", "inside", "outside", "per", "than", "like"});
    put(Pos::CONJ, {"and", "or", "but", "nor", "yet", "so", "while", "although", "though", "because", "if",
                    "unless", "whereas", "whether"});
    put(Pos::PRT, {"to", "not", "n't", "'s", "off", "up", "out"});
    put(Pos::ADV, {"when", "where", "why", "how", "then", "there", "here", "also", "still", "however",
                   "later", "soon", "again", "never", "ago", "already", "very", "only", "even", "just", "too",
                   "once", "afterwards", "afterward", "now", "thus", "often", "eventually", "finally",
                   "meanwhile", "earlier", "ever", "almost", "yesterday", "today", "tomorrow", "tonight"});
    put(Pos::VERB, {"is", "was", "were", "are", "be", "been", "being", "am", "has", "have", "had", "do",
                    "does", "did", "will", "would", "could", "should", "may", "might", "can", "shall", "must",
                    "fled", "went", "began", "took", "made", "gave", "came", "saw", "led", "fought", "won",
                    "lost", "held", "left", "met", "sent", "built", "brought", "told", "said", "stood",
                    "fell", "rose", "broke", "chose", "knew", "grew", "struck", "sank", "ran", "became",
                    "found", "kept", "paid", "slew", "withdrew", "overthrew", "begin", "break", "start",
                    "become", "take"});
    put(Pos::NUM, {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
                   "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
                   "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
                   "hundred", "thousand", "million", "billion", "dozen"});
    put(Pos::ADJ, {"first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth",
                   "tenth", "new", "old", "great", "many", "few", "several", "other", "next", "last", "same",
                   "following", "previous", "early", "late", "mid", "long", "short", "large", "small",
                   "major", "minor", "royal", "secret", "separate", "former", "certain", "whole"});
    put(Pos::NOUN, {"morning", "evening", "king", "thing", "spring", "ring", "wing", "building", "ceiling",
                    "meeting", "beginning", "nothing", "something", "anything", "everything", "bed",
                    "need", "seed", "reed", "feed", "creed", "wedding", "uprising", "offspring",
                    "lightning", "string", "sibling"});
    return m;
  }();
  return lexicon;
}

inline bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

inline bool all_punct(std::string_view w) {
  for (unsigned char c : w) {
    if (!std::ispunct(c)) return false;
  }
  return !w.empty();
}

// Digits optionally followed by an ordinal or decade suffix.
inline bool numeric_like(std::string_view w) {
  std::size_t i = 0;
  while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) ++i;
  if (i == 0) return false;
  std::string_view rest = w.substr(i);
  return rest.empty() || rest == "s" || rest == "st" || rest == "nd" || rest == "rd" || rest == "th";
}

}  // namespace detail

// Fallback tagger: closed-class lexicon, then suffix heuristics, default NOUN.
inline Pos pos_tag_word(std::string_view word) {
  const std::string w = to_lower(word);
  if (detail::all_punct(w)) return Pos::PUNCT;
  const auto& lexicon = detail::closed_class_lexicon();
  if (auto it = lexicon.find(w); it != lexicon.end()) return it->second;
  if (detail::numeric_like(w)) return Pos::NUM;
  if (detail::ends_with(w, "ly") && w.size() > 4) return Pos::ADV;
  if (detail::ends_with(w, "ed") && w.size() >= 5) return Pos::VERB;
  if (detail::ends_with(w, "ing") && w.size() >= 6) return Pos::VERB;
  if (detail::ends_with(w, "tion") || detail::ends_with(w, "sion") || detail::ends_with(w, "ness") ||
      detail::ends_with(w, "ment") || detail::ends_with(w, "ity")) {
    return Pos::NOUN;
  }
  if (detail::ends_with(w, "ous") || detail::ends_with(w, "ful") || detail::ends_with(w, "ive") ||
      detail::ends_with(w, "less")) {
    return Pos::ADJ;
  }
  return Pos::NOUN;
}

inline std::vector<Pos> pos_tag(std::span<const Token> tokens) {
  std::vector<Pos> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(pos_tag_word(t.text));
  return out;
}

inline std::vector<Pos> pos_tag(std::span<const std::string> words) {
  std::vector<Pos> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(pos_tag_word(w));
  return out;
}

}  // namespace tqr::text
