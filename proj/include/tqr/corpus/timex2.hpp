#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tqr/corpus/types.hpp"
#include "tqr/error.hpp"

namespace tqr::corpus {

namespace detail {

inline bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(s[i])) != std::toupper(static_cast<unsigned char>(prefix[i]))) return false;
  }
  return true;
}

// True when `tag` (the text between '<' and '>') names element `name`.
inline bool is_element(std::string_view tag, std::string_view name) {
  if (!iequals_prefix(tag, name)) return false;
  if (tag.size() == name.size()) return true;
  char c = tag[name.size()];
  return std::isspace(static_cast<unsigned char>(c)) || c == '/';
}

inline std::optional<std::string> attribute(std::string_view tag, std::string_view name) {
  std::size_t pos = 0;
  while ((pos = tag.find(name, pos)) != std::string_view::npos) {
    bool boundary = pos > 0 && std::isspace(static_cast<unsigned char>(tag[pos - 1]));
    std::size_t k = pos + name.size();
    while (k < tag.size() && std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
    if (boundary && k < tag.size() && tag[k] == '=') {
      ++k;
      while (k < tag.size() && std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
      if (k < tag.size() && (tag[k] == '"' || tag[k] == '\'')) {
        char q = tag[k];
        auto close = tag.find(q, k + 1);
        if (close != std::string_view::npos) return std::string(tag.substr(k + 1, close - k - 1));
      }
    }
    pos += name.size();
  }
  return std::nullopt;
}

inline std::size_t decode_entity(std::string_view s, std::string& out) {
  static const std::pair<std::string_view, char> named[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  for (const auto& [ent, c] : named) {
    if (s.substr(0, ent.size()) == ent) {
      out.push_back(c);
      return ent.size();
    }
  }
  if (s.size() > 3 && s[1] == '#') {
    auto semi = s.find(';');
    if (semi != std::string_view::npos && semi < 12) {
      bool hex = s[2] == 'x' || s[2] == 'X';
      std::string digits(s.substr(hex ? 3 : 2, semi - (hex ? 3 : 2)));
      try {
        unsigned long cp = std::stoul(digits, nullptr, hex ? 16 : 10);
        if (cp < 0x80) {
          out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
          out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
          out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
          out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        return semi + 1;
      } catch (const std::exception&) {
      }
    }
  }
  out.push_back('&');
  return 1;
}

struct StrippedText {
  std::string text;
  std::vector<TimexSpan> spans;
};

// Removes all markup, recording TIMEX2 spans against the de-tagged text.
inline StrippedText strip_markup(std::string_view xml, std::size_t begin, std::size_t end) {
  StrippedText out;
  struct Open {
    std::size_t start;
    std::optional<std::string> val;
    std::size_t byte;
  };
  std::optional<Open> open;
  std::size_t i = begin;
  while (i < end) {
    char c = xml[i];
    if (c == '<') {
      if (xml.substr(i, 4) == "<!--") {
        auto close = xml.find("-->", i + 4);
        if (close == std::string_view::npos) throw InputError("unterminated comment at byte " + std::to_string(i));
        i = close + 3;
        continue;
      }
      auto close = xml.find('>', i + 1);
      if (close == std::string_view::npos || close >= end) {
        throw InputError("unterminated tag at byte " + std::to_string(i));
      }
      std::string_view tag = xml.substr(i + 1, close - i - 1);
      if (is_element(tag, "TIMEX2")) {
        bool self_closing = !tag.empty() && tag.back() == '/';
        if (open) {
          throw InputError("nested TIMEX2 at byte " + std::to_string(i) + " (enclosing tag opened at byte " +
                           std::to_string(open->byte) + ")");
        }
        if (!self_closing) open = Open{out.text.size(), attribute(tag, "val"), i};
      } else if (is_element(tag, "/TIMEX2")) {
        if (!open) throw InputError("closing TIMEX2 without an opening tag at byte " + std::to_string(i));
        TimexSpan span;
        span.char_start = open->start;
        span.char_end = out.text.size();
        span.text = out.text.substr(span.char_start, span.char_end - span.char_start);
        span.val = open->val;
        if (span.char_end > span.char_start) out.spans.push_back(std::move(span));
        open.reset();
      }
      i = close + 1;
    } else if (c == '&') {
      i += decode_entity(xml.substr(i, end - i), out.text);
    } else {
      out.text.push_back(c);
      ++i;
    }
  }
  if (open) throw InputError("unclosed TIMEX2 tag opened at byte " + std::to_string(open->byte));
  return out;
}

inline bool blank(std::string_view line) {
  for (unsigned char c : line) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

}  // namespace detail

// Parses TIMEX2-annotated text into paragraph skeletons (text plus spans).
// When a <TEXT> element is present only its content is read. Paragraphs are
// separated by blank lines and trimmed of surrounding whitespace.
inline std::vector<Paragraph> parse_timex2(std::string_view xml, const std::string& doc_id = "doc") {
  std::size_t begin = 0, end = xml.size();
  for (std::size_t k = xml.find('<'); k != std::string_view::npos; k = xml.find('<', k + 1)) {
    auto close = xml.find('>', k);
    if (close == std::string_view::npos) break;
    if (detail::is_element(xml.substr(k + 1, close - k - 1), "TEXT")) {
      begin = close + 1;
      for (std::size_t m = xml.find("</", begin); m != std::string_view::npos; m = xml.find("</", m + 2)) {
        if (detail::iequals_prefix(xml.substr(m + 2), "TEXT>")) {
          end = m;
          break;
        }
      }
      break;
    }
  }
  auto stripped = detail::strip_markup(xml, begin, end);
  const std::string& text = stripped.text;

  std::vector<Paragraph> paragraphs;
  std::size_t span_cursor = 0;
  std::size_t pos = 0;
  auto flush = [&](std::size_t a, std::size_t b) {
    while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
    if (a == b) return;
    Paragraph p;
    p.doc_id = doc_id;
    p.para_id = "p" + std::to_string(paragraphs.size());
    p.text = text.substr(a, b - a);
    while (span_cursor < stripped.spans.size() && stripped.spans[span_cursor].char_start < b) {
      TimexSpan s = stripped.spans[span_cursor];
      if (s.char_start < a || s.char_end > b) {
        throw InputError("TIMEX2 span '" + s.text + "' crosses a paragraph boundary");
      }
      s.char_start -= a;
      s.char_end -= a;
      p.timexes.push_back(std::move(s));
      ++span_cursor;
    }
    paragraphs.push_back(std::move(p));
  };
  std::size_t para_start = 0;
  bool in_para = false;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t line_end = nl == std::string::npos ? text.size() : nl;
    bool is_blank = detail::blank(std::string_view(text).substr(pos, line_end - pos));
    if (is_blank && in_para) {
      flush(para_start, pos);
      in_para = false;
    } else if (!is_blank && !in_para) {
      para_start = pos;
      in_para = true;
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  if (in_para) flush(para_start, text.size());
  if (span_cursor != stripped.spans.size()) throw InputError("TIMEX2 span outside any paragraph");
  return paragraphs;
}

inline Document parse_timex2_document(std::string_view xml, const std::string& doc_id) {
  return Document{doc_id, parse_timex2(xml, doc_id)};
}

// Re-inserts TIMEX2 tags at the recorded offsets.
inline std::string render_timex2(const Paragraph& p) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& s : p.timexes) {
    out.append(p.text, cursor, s.char_start - cursor);
    out += s.val ? "<TIMEX2 val=\"" + *s.val + "\">" : std::string("<TIMEX2>");
    out.append(p.text, s.char_start, s.char_end - s.char_start);
    out += "</TIMEX2>";
    cursor = s.char_end;
  }
  out.append(p.text, cursor, std::string::npos);
  return out;
}

}  // namespace tqr::corpus
