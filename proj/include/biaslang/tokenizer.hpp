#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "biaslang/wikitext.hpp"

namespace biaslang {

namespace detail {

inline bool is_leading_punct(char c) { return c == '"' || c == '\'' || c == '(' || c == '[' || c == '{' || c == '`'; }

inline bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' || c == '\'' || c == ')' ||
         c == ']' || c == '}';
}

}  // namespace detail

// Whitespace split, then opening quotes/brackets peeled off the front and
// clause/sentence punctuation and closing quotes peeled off the back, each
// as its own token. Known abbreviations ("St.", "U.S.") keep their period.
// Case is preserved.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view chunk = text.substr(i, j - i);
    i = j;
    if (chunk.empty()) continue;

    while (!chunk.empty() && detail::is_leading_punct(chunk.front())) {
      out.emplace_back(1, chunk.front());
      chunk.remove_prefix(1);
    }
    std::vector<std::string> tail;
    while (!chunk.empty() && detail::is_trailing_punct(chunk.back())) {
      if (chunk.back() == '.' && detail::is_abbreviation(chunk)) break;
      tail.emplace_back(1, chunk.back());
      chunk.remove_suffix(1);
    }
    if (!chunk.empty()) out.emplace_back(chunk);
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace biaslang
