#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tqr/corpus/types.hpp"
#include "tqr/error.hpp"
#include "tqr/log.hpp"
#include "tqr/text/pipeline.hpp"

namespace tqr::corpus {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string quote(std::string_view s) { return "\"" + std::string(s) + "\""; }

// Aligns gold token strings against `source`, assigning byte offsets.
inline std::vector<text::Token> align_tokens(std::string_view source, const Json& list, const std::string& where) {
  std::vector<text::Token> tokens;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& entry = list[i];
    if (!entry.is_object() || !entry.contains("text") || !entry["text"].is_string()) {
      throw InputError(where + ": token " + std::to_string(i) + " needs a string 'text'");
    }
    std::string tok = entry["text"].get<std::string>();
    while (cursor < source.size() && std::isspace(static_cast<unsigned char>(source[cursor]))) ++cursor;
    if (tok.empty() || source.substr(cursor, tok.size()) != tok) {
      throw InputError(where + ": token " + std::to_string(i) + " " + quote(tok) +
                       " does not align with the text at byte " + std::to_string(cursor));
    }
    text::Token t;
    t.text = tok;
    t.lower = text::to_lower(tok);
    t.char_start = cursor;
    t.char_end = cursor + tok.size();
    cursor = t.char_end;
    tokens.push_back(std::move(t));
  }
  return tokens;
}

// Fallback annotation, then any gold lemma/pos/ner override.
inline std::vector<text::Token> build_tokens(std::string_view source, const Json* gold, const std::string& where) {
  if (!gold) return text::tokenize_and_annotate(source);
  if (!gold->is_array()) throw InputError(where + ": token list must be an array");
  auto tokens = align_tokens(source, *gold, where);
  text::annotate(tokens);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& entry = (*gold)[i];
    try {
      if (entry.contains("pos")) tokens[i].pos = text::parse_pos(entry["pos"].get<std::string>());
      if (entry.contains("ner")) tokens[i].ner = text::parse_ner(entry["ner"].get<std::string>());
      if (entry.contains("lemma")) tokens[i].lemma = entry["lemma"].get<std::string>();
      else if (entry.contains("pos")) tokens[i].lemma = text::lemmatize(tokens[i].text, tokens[i].pos);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": token " + std::to_string(i) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(where + ": token " + std::to_string(i) + ": " + e.what());
    }
    if (tokens[i].lemma.empty()) throw InputError(where + ": token " + std::to_string(i) + " has an empty lemma");
  }
  return tokens;
}

template <typename V>
V field(const Json& record, const char* name, const std::string& where) {
  if (!record.contains(name)) throw InputError(where + ": missing field '" + name + "'");
  try {
    return record.at(name).get<V>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(where + ": field '" + std::string(name) + "' has the wrong type");
  }
}

// Snaps each timex outward to covering token boundaries.
inline void snap_timexes(Paragraph& p, const std::string& where) {
  for (auto& s : p.timexes) {
    std::size_t start = s.char_start, end = s.char_end;
    for (const auto& t : p.tokens) {
      if (t.char_start < s.char_end && t.char_end > s.char_start) {
        start = std::min(start, t.char_start);
        end = std::max(end, t.char_end);
      }
    }
    if (start != s.char_start || end != s.char_end) {
      warn(where + ": timex " + quote(s.text) + " snapped to token boundaries as " +
           quote(std::string_view(p.text).substr(start, end - start)));
      s.char_start = start;
      s.char_end = end;
      s.text = p.text.substr(start, end - start);
    }
  }
}

inline Json tokens_to_json(const std::vector<text::Token>& tokens) {
  Json list = Json::array();
  for (const auto& t : tokens) {
    Json e;
    e["text"] = t.text;
    e["lemma"] = t.lemma;
    e["pos"] = std::string(text::to_string(t.pos));
    e["ner"] = std::string(text::to_string(t.ner));
    list.push_back(std::move(e));
  }
  return list;
}

}  // namespace detail

inline bool overlaps_timex(const QAExample& ex) {
  const auto& toks = ex.paragraph->tokens;
  std::size_t a = toks[ex.answer_start].char_start, b = toks[ex.answer_end].char_end;
  return std::any_of(ex.paragraph->timexes.begin(), ex.paragraph->timexes.end(),
                     [&](const TimexSpan& s) { return s.char_start < b && s.char_end > a; });
}

// Parses JSON-lines dataset content. Every record is validated; paragraphs
// shared by several records are built once.
inline std::vector<QAExample> parse_dataset(std::string_view content, const std::string& origin = "dataset") {
  std::vector<QAExample> out;
  std::map<std::string, std::pair<std::shared_ptr<Paragraph>, Json>> paragraphs;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    Json record;
    try {
      record = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": invalid JSON: " + e.what());
    }
    if (!record.is_object()) throw InputError(where + ": record must be a JSON object");

    auto doc_id = detail::field<std::string>(record, "doc_id", where);
    auto para_id = detail::field<std::string>(record, "para_id", where);
    auto para_text = detail::field<std::string>(record, "paragraph_text", where);
    if (!record.contains("timexes") || !record["timexes"].is_array()) {
      throw InputError(where + ": missing field 'timexes' (array)");
    }
    const std::string key = doc_id + '/' + para_id;
    auto found = paragraphs.find(key);
    std::shared_ptr<Paragraph> para;
    if (found != paragraphs.end()) {
      para = found->second.first;
      if (para->text != para_text || found->second.second != record["timexes"]) {
        throw InputError(where + ": paragraph " + key + " repeats with different text or timexes");
      }
    } else {
      para = std::make_shared<Paragraph>();
      para->doc_id = doc_id;
      para->para_id = para_id;
      para->text = para_text;
      for (const auto& tj : record["timexes"]) {
        TimexSpan s;
        s.char_start = detail::field<std::size_t>(tj, "start", where);
        s.char_end = detail::field<std::size_t>(tj, "end", where);
        s.text = detail::field<std::string>(tj, "text", where);
        if (tj.contains("val") && !tj["val"].is_null()) s.val = detail::field<std::string>(tj, "val", where);
        if (s.char_start >= s.char_end || s.char_end > para_text.size()) {
          throw InputError(where + ": timex [" + std::to_string(s.char_start) + ", " + std::to_string(s.char_end) +
                           ") outside the paragraph");
        }
        std::string slice = para_text.substr(s.char_start, s.char_end - s.char_start);
        if (slice != s.text) {
          throw InputError(where + ": timex text " + detail::quote(s.text) + " differs from paragraph slice " +
                           detail::quote(slice));
        }
        para->timexes.push_back(std::move(s));
      }
      std::sort(para->timexes.begin(), para->timexes.end(),
                [](const TimexSpan& a, const TimexSpan& b) { return a.char_start < b.char_start; });
      for (std::size_t k = 1; k < para->timexes.size(); ++k) {
        if (para->timexes[k].char_start < para->timexes[k - 1].char_end) {
          throw InputError(where + ": timexes " + detail::quote(para->timexes[k - 1].text) + " and " +
                           detail::quote(para->timexes[k].text) + " overlap");
        }
      }
      para->tokens = detail::build_tokens(para_text, record.contains("tokens") ? &record["tokens"] : nullptr, where);
      if (para->tokens.empty()) throw InputError(where + ": paragraph has no tokens");
      detail::snap_timexes(*para, where);
      paragraphs.emplace(key, std::make_pair(para, record["timexes"]));
    }

    QAExample ex;
    ex.paragraph = para;
    ex.question_text = detail::field<std::string>(record, "question", where);
    ex.question_tokens = detail::build_tokens(
        ex.question_text, record.contains("question_tokens") ? &record["question_tokens"] : nullptr, where);
    if (ex.question_tokens.empty()) throw InputError(where + ": empty question");
    ex.answer_start = detail::field<std::size_t>(record, "answer_token_start", where);
    ex.answer_end = detail::field<std::size_t>(record, "answer_token_end", where);
    ex.answer_text = detail::field<std::string>(record, "answer_text", where);
    if (ex.answer_start > ex.answer_end || ex.answer_end >= para->tokens.size()) {
      throw InputError(where + ": answer span [" + std::to_string(ex.answer_start) + ", " +
                       std::to_string(ex.answer_end) + "] invalid for " + std::to_string(para->tokens.size()) +
                       " paragraph tokens");
    }
    std::string span = text::detokenize(para->text, para->tokens, ex.answer_start, ex.answer_end);
    if (span != ex.answer_text) {
      throw InputError(where + ": answer_text " + detail::quote(ex.answer_text) + " does not match gold span " +
                       detail::quote(span));
    }
    if (!para->timexes.empty() && !overlaps_timex(ex)) {
      warn(where + ": answer " + detail::quote(ex.answer_text) + " does not overlap any timex");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

inline std::vector<QAExample> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

inline Json example_to_json(const QAExample& ex) {
  const Paragraph& p = *ex.paragraph;
  Json r;
  r["doc_id"] = p.doc_id;
  r["para_id"] = p.para_id;
  r["paragraph_text"] = p.text;
  Json timexes = Json::array();
  for (const auto& s : p.timexes) {
    Json t;
    t["start"] = s.char_start;
    t["end"] = s.char_end;
    t["text"] = s.text;
    if (s.val) t["val"] = *s.val;
    timexes.push_back(std::move(t));
  }
  r["timexes"] = std::move(timexes);
  r["question"] = ex.question_text;
  r["answer_token_start"] = ex.answer_start;
  r["answer_token_end"] = ex.answer_end;
  r["answer_text"] = ex.answer_text;
  r["tokens"] = detail::tokens_to_json(p.tokens);
  r["question_tokens"] = detail::tokens_to_json(ex.question_tokens);
  return r;
}

// Canonical JSON-lines encoding with full token annotations.
inline std::string serialize_dataset(const std::vector<QAExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += example_to_json(ex).dump();
    out.push_back('\n');
  }
  return out;
}

inline void save_dataset(const std::filesystem::path& path, const std::vector<QAExample>& examples) {
  write_file(path, serialize_dataset(examples));
}

// Copies the examples with tf-idf filled in on every paragraph token.
inline std::vector<QAExample> with_tfidf(const std::vector<QAExample>& examples, const text::DocumentFrequency& table) {
  std::map<const Paragraph*, std::shared_ptr<const Paragraph>> rebuilt;
  std::vector<QAExample> out = examples;
  for (auto& ex : out) {
    auto& slot = rebuilt[ex.paragraph.get()];
    if (!slot) {
      auto copy = std::make_shared<Paragraph>(*ex.paragraph);
      text::apply_tfidf(copy->tokens, table);
      slot = copy;
    }
    ex.paragraph = slot;
  }
  return out;
}

// Distinct paragraphs in first-appearance order.
inline std::vector<std::shared_ptr<const Paragraph>> distinct_paragraphs(const std::vector<QAExample>& examples) {
  std::vector<std::shared_ptr<const Paragraph>> out;
  std::map<std::string, bool> seen;
  for (const auto& ex : examples) {
    if (!seen.emplace(paragraph_key(*ex.paragraph), true).second) continue;
    out.push_back(ex.paragraph);
  }
  return out;
}

inline text::DocumentFrequency document_frequency(const std::vector<QAExample>& examples) {
  text::DocumentFrequency table;
  for (const auto& p : distinct_paragraphs(examples)) table.add_paragraph(p->tokens);
  return table;
}

}  // namespace tqr::corpus
