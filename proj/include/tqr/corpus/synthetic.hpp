#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/dataset.hpp"
#include "tqr/error.hpp"
#include "tqr/nn/random.hpp"
#include "tqr/text/tokenizer.hpp"

namespace tqr::corpus {

namespace synth {

struct Action {
  const char* base;
  const char* past;
  const char* participle;
  std::vector<const char*> objects;
};

struct Timex {
  std::string text;
  std::string preposition;  // "" when the phrase stands alone
  std::string question_word;
  std::string val;
};

inline const std::vector<const char*>& subjects() {
  static const std::vector<const char*> v = {
      "the king", "the emperor", "the queen", "the rebels", "the army", "the council", "the French fleet",
      "the duke", "the governor", "the prussian general", "the royal guard", "the bishop"};
  return v;
}

inline const std::vector<Action>& actions() {
  static const std::vector<Action> v = {
      {"sign", "signed", "signed", {"the treaty", "the decree", "the charter"}},
      {"capture", "captured", "captured", {"the fortress", "the bridge", "the harbor"}},
      {"besiege", "besieged", "besieged", {"the city", "the citadel"}},
      {"attack", "attacked", "attacked", {"the garrison", "the convoy", "the outpost"}},
      {"abandon", "abandoned", "abandoned", {"the capital", "the palace"}},
      {"occupy", "occupied", "occupied", {"the province", "the valley"}},
      {"leave", "left", "left", {"the Tuileries", "the palace", "the camp"}},
      {"burn", "burned", "burned", {"the archives", "the bridge"}},
      {"found", "founded", "founded", {"the academy", "the colony"}},
      {"negotiate", "negotiated", "negotiated", {"the truce", "the alliance"}}};
  return v;
}

inline const std::vector<const char*>& places() {
  static const std::vector<const char*> v = {"Paris", "Vienna", "Varennes", "Moscow", "Lisbon",
                                             "Toulon", "Madrid", "Warsaw", "Naples", "Ghent"};
  return v;
}

inline const std::vector<const char*>& months() {
  static const std::vector<const char*> v = {"January", "February", "March",     "April",   "May",      "June",
                                             "July",    "August",   "September", "October", "November", "December"};
  return v;
}

inline std::string two_digits(std::size_t v) { return (v < 10 ? "0" : "") + std::to_string(v); }

inline Timex make_timex(nn::Rng& rng) {
  const std::size_t year = 1500 + rng.below(450);
  const std::size_t month = rng.below(12);
  const std::size_t day = 1 + rng.below(28);
  const std::string m = months()[month];
  const std::string iso = std::to_string(year) + "-" + two_digits(month + 1) + "-" + two_digits(day);
  static const std::vector<const char*> seasons = {"spring", "summer", "autumn", "winter"};
  static const std::vector<const char*> counts = {"two", "three", "four", "five", "six", "ten"};
  static const std::vector<const char*> dayparts = {"night", "morning", "evening"};
  switch (rng.below(7)) {
    case 0:
      return {std::to_string(day) + " " + m + " " + std::to_string(year), "on", "day", iso};
    case 1:
      return {m + " " + std::to_string(day) + ", " + std::to_string(year), "on", "day", iso};
    case 2:
      return {m + " " + std::to_string(year), "in", "month", iso.substr(0, 7)};
    case 3:
      return {std::to_string(year), "in", "year", std::to_string(year)};
    case 4: {
      std::string season = rng.pick(seasons);
      return {"the " + season + " of " + std::to_string(year), "in", "season", std::to_string(year)};
    }
    case 5: {
      std::string daypart = rng.pick(dayparts);
      return {"the " + daypart + " of " + std::to_string(day) + " " + m + " " + std::to_string(year), "on", "time", iso};
    }
    default: {
      std::string count = rng.pick(counts);
      bool years = rng.below(2) == 0;
      return {count + (years ? " years ago" : " weeks ago"), "", years ? "year" : "time", "PAST_REF"};
    }
  }
}

inline std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// Non-temporal sentence, sometimes carrying a distractor number below 1000.
inline std::string filler(nn::Rng& rng) {
  const std::string place = rng.pick(places());
  const std::string who = rng.pick(subjects());
  const std::string n = std::to_string(20 + rng.below(900));
  switch (rng.below(6)) {
    case 0:
      return "The garrison of " + place + " numbered some " + n + " men.";
    case 1:
      return capitalize(who) + " sent " + n + " letters to the ministers.";
    case 2:
      return "The road to " + place + " ran for " + n + " miles through the hills.";
    case 3:
      return "Many nobles in " + place + " opposed the plan.";
    case 4:
      return "The people of " + place + " welcomed the news with caution.";
    default:
      return "Rumours spread quickly among the soldiers near " + place + ".";
  }
}

}  // namespace synth

// Template-generated history-style paragraphs. Each paragraph holds exactly
// one timex, and each timex gets three paraphrased questions. The output is
// JSON-lines in the dataset schema and depends only on (n_paragraphs, seed).
inline std::string synthetic_jsonl(std::size_t n_paragraphs, std::uint64_t seed) {
  if (n_paragraphs == 0) throw InputError("synthetic corpus needs at least one paragraph");
  nn::Rng rng(seed);
  std::string out;
  for (std::size_t k = 0; k < n_paragraphs; ++k) {
    const std::string subject = rng.pick(synth::subjects());
    const synth::Action& act = rng.pick(synth::actions());
    const std::string object = rng.pick(act.objects);
    const synth::Timex timex = synth::make_timex(rng);

    std::string main;
    std::size_t timex_offset = 0;
    std::string timex_text = timex.text;
    if (rng.below(2) == 0) {
      std::string lead = timex.preposition.empty() ? "" : synth::capitalize(timex.preposition) + " ";
      if (lead.empty()) timex_text = synth::capitalize(timex_text);
      timex_offset = lead.size();
      main = lead + timex_text + ", " + subject + " " + act.past + " " + object + ".";
    } else {
      std::string head = synth::capitalize(subject) + " " + act.past + " " + object + " ";
      if (!timex.preposition.empty()) head += timex.preposition + " ";
      timex_offset = head.size();
      main = head + timex_text + ".";
    }

    std::vector<std::string> before, after;
    const std::size_t n_before = rng.below(3), n_after = 1 + rng.below(2);
    for (std::size_t i = 0; i < n_before; ++i) before.push_back(synth::filler(rng));
    for (std::size_t i = 0; i < n_after; ++i) after.push_back(synth::filler(rng));

    std::string text;
    for (const auto& s : before) text += s + " ";
    const std::size_t start = text.size() + timex_offset;
    text += main;
    for (const auto& s : after) text += " " + s;
    const std::size_t end = start + timex_text.size();

    auto tokens = text::tokenize(text);
    std::size_t first = tokens.size(), last = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].char_start >= start && tokens[i].char_end <= end) {
        first = std::min(first, i);
        last = i;
      }
    }

    const std::vector<std::string> questions = {
        "When did " + subject + " " + act.base + " " + object + "?",
        "What " + timex.question_word + " did " + subject + " " + act.base + " " + object + "?",
        "When was " + object + " " + act.participle + " by " + subject + "?"};
    for (const auto& q : questions) {
      Json r;
      r["doc_id"] = "synthetic-" + std::to_string(k / 4);
      r["para_id"] = "p" + std::to_string(k % 4);
      r["paragraph_text"] = text;
      Json span;
      span["start"] = start;
      span["end"] = end;
      span["text"] = timex_text;
      span["val"] = timex.val;
      r["timexes"] = Json::array({span});
      r["question"] = synth::capitalize(q);
      r["answer_token_start"] = first;
      r["answer_token_end"] = last;
      r["answer_text"] = text.substr(tokens[first].char_start, tokens[last].char_end - tokens[first].char_start);
      out += r.dump();
      out.push_back('\n');
    }
  }
  return out;
}

inline std::vector<QAExample> generate_synthetic(std::size_t n_paragraphs, std::uint64_t seed) {
  return parse_dataset(synthetic_jsonl(n_paragraphs, seed), "synthetic");
}

}  // namespace tqr::corpus
