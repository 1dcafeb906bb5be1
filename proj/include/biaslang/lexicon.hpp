#pragma once

// Word-category lexicon in the LIWC style. Each pattern is either an exact
// lowercase word or a prefix wildcard ("abus*") and carries one or more
// categories. When a token matches several categories the most descriptive
// one wins: the category carried by the fewest patterns.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "biaslang/error.hpp"
#include "biaslang/tokenizer.hpp"

namespace biaslang {

struct LexiconPattern {
  std::string pattern;  // without the trailing '*'
  bool wildcard = false;
  std::vector<std::size_t> categories;  // indices into the category list
};

class CategoryLexicon {
 public:
  static constexpr int kNoCategory = -1;

  CategoryLexicon() = default;

  // TSV: pattern<TAB>cat1,cat2,...   Blank lines and lines starting with
  // '#' are skipped.
  static CategoryLexicon parse(std::istream& in) {
    CategoryLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0) throw FormatError("lexicon line needs pattern<TAB>categories", lineno);
      std::vector<std::string> cats;
      std::stringstream ss(line.substr(tab + 1));
      std::string cat;
      while (std::getline(ss, cat, ',')) {
        auto b = cat.find_first_not_of(" \t");
        auto e = cat.find_last_not_of(" \t");
        if (b != std::string::npos) cats.push_back(cat.substr(b, e - b + 1));
      }
      if (cats.empty()) throw FormatError("lexicon pattern without categories", lineno);
      lex.add(line.substr(0, tab), cats);
    }
    return lex;
  }

  static CategoryLexicon load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon " + path);
    return parse(in);
  }

  // `pattern` may end in '*' to mark a prefix wildcard. Repeated patterns
  // merge their categories.
  void add(std::string_view pattern, const std::vector<std::string>& categories) {
    bool wildcard = !pattern.empty() && pattern.back() == '*';
    if (wildcard) pattern.remove_suffix(1);
    std::string key = lowercase(pattern);
    auto& index = wildcard ? prefix_index_ : exact_index_;
    auto [it, inserted] = index.emplace(key, patterns_.size());
    if (inserted) patterns_.push_back({key, wildcard, {}});
    auto& cats = patterns_[it->second].categories;
    for (const auto& name : categories) {
      std::size_t id = category_id(name);
      if (std::find(cats.begin(), cats.end(), id) == cats.end()) cats.push_back(id);
    }
  }

  const std::vector<std::string>& categories() const { return category_list_; }
  const std::vector<LexiconPattern>& patterns() const { return patterns_; }
  bool empty() const { return patterns_.empty(); }

  int find_category(std::string_view name) const {
    auto it = category_ids_.find(std::string(name));
    return it == category_ids_.end() ? kNoCategory : static_cast<int>(it->second);
  }

  // Categories of every pattern matching the lowercase token.
  std::vector<std::size_t> matching_categories(std::string_view token) const {
    std::vector<std::size_t> out;
    auto take = [&](std::size_t pattern) {
      for (auto c : patterns_[pattern].categories) {
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
      }
    };
    if (auto it = exact_index_.find(std::string(token)); it != exact_index_.end()) take(it->second);
    for (std::size_t len = 0; len <= token.size(); ++len) {
      if (auto it = prefix_index_.find(std::string(token.substr(0, len))); it != prefix_index_.end()) take(it->second);
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json patterns = nlohmann::json::array();
    for (const auto& p : patterns_) {
      std::vector<std::string> names;
      for (auto c : p.categories) names.push_back(category_list_[c]);
      patterns.push_back({p.wildcard ? p.pattern + "*" : p.pattern, names});
    }
    return {{"categories", category_list_}, {"patterns", patterns}};
  }

  static CategoryLexicon from_json(const nlohmann::json& j) {
    CategoryLexicon lex;
    for (const auto& c : j.at("categories")) lex.category_id(c.get<std::string>());
    for (const auto& p : j.at("patterns")) lex.add(p.at(0).get<std::string>(), p.at(1).get<std::vector<std::string>>());
    return lex;
  }

 private:
  std::size_t category_id(const std::string& name) {
    auto [it, inserted] = category_ids_.emplace(name, category_list_.size());
    if (inserted) category_list_.push_back(name);
    return it->second;
  }

  std::vector<std::string> category_list_;
  std::unordered_map<std::string, std::size_t> category_ids_;
  std::vector<LexiconPattern> patterns_;
  std::unordered_map<std::string, std::size_t> exact_index_;
  std::unordered_map<std::string, std::size_t> prefix_index_;
};

// IDF-style weight log(P / n_c): P patterns in total, n_c of them carrying
// category c. Categories no pattern carries are left out.
inline std::map<std::string, double> compute_descriptiveness(const CategoryLexicon& lexicon) {
  if (lexicon.empty()) throw ValidationError("descriptiveness of an empty lexicon");
  std::vector<std::size_t> counts(lexicon.categories().size(), 0);
  for (const auto& p : lexicon.patterns()) {
    for (auto c : p.categories) ++counts[c];
  }
  const double total = static_cast<double>(lexicon.patterns().size());
  std::map<std::string, double> out;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) out[lexicon.categories()[c]] = std::log(total / static_cast<double>(counts[c]));
  }
  return out;
}

// Most descriptive matching category of a token, as an index into the
// lexicon's category list, or kNoCategory. Ties go to the earlier category.
inline int liwc_assign(std::string_view token, const CategoryLexicon& lexicon,
                       const std::map<std::string, double>& descriptiveness) {
  int best = CategoryLexicon::kNoCategory;
  double best_score = -INFINITY;
  for (auto c : lexicon.matching_categories(lowercase(token))) {
    auto it = descriptiveness.find(lexicon.categories()[c]);
    if (it == descriptiveness.end()) continue;
    const int id = static_cast<int>(c);
    if (it->second > best_score || (it->second == best_score && id < best)) {
      best_score = it->second;
      best = id;
    }
  }
  return best;
}

}  // namespace biaslang
