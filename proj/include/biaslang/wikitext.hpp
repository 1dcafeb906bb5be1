#pragma once

// Wikitext to sentence-level statements: markup stripping, section
// tracking, sentence segmentation and the token sets used for similarity.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace biaslang {

struct Statement {
  std::string text;
  std::string section;  // empty for the lead section
  std::vector<std::string> token_set;  // sorted, unique

  friend bool operator==(const Statement& a, const Statement& b) {
    return a.text == b.text && a.section == b.section;
  }
};

struct SegmentStats {
  std::size_t dropped_regions = 0;  // unterminated templates, refs, comments, links
};

namespace detail {

inline bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

inline std::size_t end_of_line(std::string_view s, std::size_t pos) {
  std::size_t nl = s.find('\n', pos);
  return nl == std::string_view::npos ? s.size() : nl;
}

// Removes balanced `open ... close` regions with nesting. An unbalanced
// opener drops the remainder of its line.
inline std::string remove_nested(std::string_view s, std::string_view open, std::string_view close,
                                 SegmentStats& stats) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, open.size(), open) != 0) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t depth = 0, j = i;
    while (j < s.size()) {
      if (s.compare(j, open.size(), open) == 0) {
        ++depth;
        j += open.size();
      } else if (s.compare(j, close.size(), close) == 0) {
        --depth;
        j += close.size();
        if (depth == 0) break;
      } else {
        ++j;
      }
    }
    if (depth != 0) {
      ++stats.dropped_regions;
      i = end_of_line(s, i);
    } else {
      i = j;
    }
  }
  return out;
}

inline std::string remove_comments(std::string_view s, SegmentStats& stats) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t open = s.find("<!--", i);
    if (open == std::string_view::npos) {
      out.append(s.substr(i));
      break;
    }
    out.append(s.substr(i, open - i));
    std::size_t close = s.find("-->", open + 4);
    if (close == std::string_view::npos) {
      ++stats.dropped_regions;
      break;
    }
    i = close + 3;
  }
  return out;
}

// <ref>...</ref>, <ref name=x>...</ref> and <ref name=x />.
inline std::string remove_refs(std::string_view s, SegmentStats& stats) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!(starts_with_ci(s, i, "<ref") &&
          (i + 4 == s.size() || s[i + 4] == '>' || std::isspace(static_cast<unsigned char>(s[i + 4])) ||
           s[i + 4] == '/'))) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t tag_end = s.find('>', i);
    if (tag_end == std::string_view::npos) {
      ++stats.dropped_regions;
      i = end_of_line(s, i);
      continue;
    }
    if (s[tag_end - 1] == '/') {
      i = tag_end + 1;
      continue;
    }
    std::size_t j = tag_end + 1;
    std::size_t close = std::string_view::npos;
    for (; j < s.size(); ++j) {
      if (starts_with_ci(s, j, "</ref")) {
        close = j;
        break;
      }
    }
    if (close == std::string_view::npos) {
      ++stats.dropped_regions;
      i = end_of_line(s, i);
      continue;
    }
    std::size_t gt = s.find('>', close);
    i = gt == std::string_view::npos ? s.size() : gt + 1;
  }
  return out;
}

inline bool is_media_link(std::string_view target) {
  static constexpr std::array<std::string_view, 4> kPrefixes = {"file:", "image:", "category:", "media:"};
  for (auto p : kPrefixes) {
    if (starts_with_ci(target, 0, p)) return true;
  }
  return false;
}

// [[target|label]] -> label, [[target]] -> target, media/category links
// removed together with any nested links in their captions.
inline std::string reduce_links(std::string_view s, SegmentStats& stats) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "[[") != 0) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t depth = 0, j = i;
    while (j < s.size()) {
      if (s.compare(j, 2, "[[") == 0) {
        ++depth;
        j += 2;
      } else if (s.compare(j, 2, "]]") == 0) {
        --depth;
        j += 2;
        if (depth == 0) break;
      } else {
        ++j;
      }
    }
    if (depth != 0) {
      ++stats.dropped_regions;
      i = end_of_line(s, i);
      continue;
    }
    std::string_view inner = s.substr(i + 2, j - i - 4);
    i = j;
    if (is_media_link(inner)) continue;
    std::size_t bar = inner.rfind('|');
    std::string_view surface = bar == std::string_view::npos ? inner : inner.substr(bar + 1);
    out.append(reduce_links(surface, stats));
  }
  return out;
}

// [http://example.org label] -> label
inline std::string reduce_external_links(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '[' && (starts_with_ci(s, i + 1, "http://") || starts_with_ci(s, i + 1, "https://") ||
                        starts_with_ci(s, i + 1, "//"))) {
      std::size_t close = s.find(']', i);
      std::size_t nl = end_of_line(s, i);
      if (close != std::string_view::npos && close < nl) {
        std::string_view inner = s.substr(i + 1, close - i - 1);
        std::size_t sp = inner.find(' ');
        if (sp != std::string_view::npos) out.append(trim(inner.substr(sp + 1)));
        i = close + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::string remove_html_tags(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<' && i + 1 < s.size() &&
        (std::isalpha(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '/')) {
      std::size_t close = s.find('>', i);
      if (close != std::string_view::npos && close < end_of_line(s, i)) {
        // <br> separates words
        if (starts_with_ci(s, i + 1, "br")) out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::string decode_entities(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kEntities = {{
      {"&nbsp;", " "},
      {"&amp;", "&"},
      {"&quot;", "\""},
      {"&lt;", "<"},
      {"&gt;", ">"},
      {"&ndash;", "–"},
      {"&mdash;", "—"},
      {"&#39;", "'"},
  }};
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    bool hit = false;
    if (s[i] == '&') {
      for (auto [from, to] : kEntities) {
        if (s.compare(i, from.size(), from) == 0) {
          out.append(to);
          i += from.size();
          hit = true;
          break;
        }
      }
    }
    if (!hit) out.push_back(s[i++]);
  }
  return out;
}

inline std::string remove_emphasis(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "''") == 0) {
      while (i < s.size() && s[i] == '\'') ++i;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

// Heading line "== Title ==" -> "Title"; returns false for ordinary lines.
inline bool parse_heading(std::string_view line, std::string& title) {
  line = trim(line);
  if (line.size() < 2 || line.front() != '=' || line.back() != '=') return false;
  std::size_t lead = line.find_first_not_of('=');
  if (lead == std::string_view::npos) return false;
  std::size_t tail = line.size() - 1 - line.find_last_not_of('=');
  std::size_t level = std::min(lead, tail);
  title = std::string(trim(line.substr(level, line.size() - 2 * level)));
  return true;
}

inline const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> kList = {
      "mr.",   "mrs.", "ms.",   "dr.",   "st.",  "jr.",   "sr.",   "prof.", "gen.",  "col.",  "lt.",
      "sgt.",  "capt.", "rev.", "hon.",  "mt.",  "ft.",   "no.",   "inc.",  "ltd.",  "co.",   "corp.",
      "vs.",   "u.s.", "u.k.",  "e.g.",  "i.e.", "jan.",  "feb.",  "aug.",  "sept.", "oct.",  "nov.",
      "dec.",  "approx.", "ca.", "cf.",  "al.",  "fig.",  "vol.",  "op.",   "est."};
  return kList;
}

inline bool is_abbreviation(std::string_view word) {
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
    word.remove_prefix(1);
  }
  std::string lower(word);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (std::find(abbreviations().begin(), abbreviations().end(), lower) != abbreviations().end()) return true;
  // initials such as "J."
  return word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]));
}

inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

}  // namespace detail

// Splits on [.?!] followed by whitespace and an uppercase letter, or by the
// end of the text. Known abbreviations and initials do not end a sentence.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto s = detail::trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t j = i + 1;
    while (j < text.size() && detail::is_closer(text[j])) ++j;
    std::size_t k = j;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    bool boundary = false;
    if (k == text.size()) {
      boundary = true;
    } else if (k > j && std::isupper(static_cast<unsigned char>(text[k]))) {
      boundary = true;
    }
    if (!boundary) continue;
    if (c == '.') {
      std::size_t w = i;
      while (w > start && !std::isspace(static_cast<unsigned char>(text[w - 1]))) --w;
      if (k != text.size() && detail::is_abbreviation(text.substr(w, i + 1 - w))) continue;
    }
    emit(j);
    i = j - 1;
  }
  emit(text.size());
  return out;
}

// Lowercased alphanumeric runs; bytes >= 0x80 count as word characters so
// UTF-8 words stay whole.
inline std::vector<std::string> token_set(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (detail::is_word_byte(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

inline Statement make_statement(std::string text, std::string section = {}) {
  Statement s{std::move(text), std::move(section), {}};
  s.token_set = token_set(s.text);
  return s;
}

// Surface text of a wikitext fragment, line structure preserved.
inline std::string strip_markup(std::string_view wikitext, SegmentStats& stats) {
  std::string s = detail::remove_comments(wikitext, stats);
  s = detail::remove_refs(s, stats);
  s = detail::remove_nested(s, "{{", "}}", stats);
  s = detail::remove_nested(s, "{|", "|}", stats);
  s = detail::reduce_links(s, stats);
  s = detail::reduce_external_links(s);
  s = detail::remove_html_tags(s);
  s = detail::remove_emphasis(s);
  return detail::decode_entities(s);
}

inline std::vector<Statement> segment_statements(std::string_view wikitext, SegmentStats* stats = nullptr) {
  SegmentStats local;
  SegmentStats& st = stats ? *stats : local;
  std::string plain = strip_markup(wikitext, st);

  std::vector<Statement> out;
  std::string section;
  std::size_t pos = 0;
  while (pos <= plain.size()) {
    std::size_t nl = plain.find('\n', pos);
    if (nl == std::string::npos) nl = plain.size();
    std::string_view line(plain.data() + pos, nl - pos);
    pos = nl + 1;

    std::string title;
    if (detail::parse_heading(line, title)) {
      section = detail::collapse_spaces(title);
      continue;
    }
    line = detail::trim(line);
    while (!line.empty() && (line.front() == '*' || line.front() == '#' || line.front() == ':' ||
                             line.front() == ';')) {
      line.remove_prefix(1);
    }
    line = detail::trim(line);
    if (line.empty() || line.front() == '|' || line.front() == '!' || line.starts_with("----")) continue;
    for (auto& sentence : split_sentences(detail::collapse_spaces(line))) {
      out.push_back(make_statement(std::move(sentence), section));
    }
  }
  return out;
}

// |A ∩ B| / |A ∪ B| over token sets; 1.0 when both are empty.
inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

inline double jaccard(const Statement& a, const Statement& b) { return jaccard(a.token_set, b.token_set); }

}  // namespace biaslang
