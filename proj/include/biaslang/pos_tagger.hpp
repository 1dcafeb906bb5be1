#pragma once

#include <cctype>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "biaslang/error.hpp"
#include "biaslang/tokenizer.hpp"

namespace biaslang {

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // One Penn Treebank tag per token.
  virtual std::vector<std::string> tag(std::span<const std::string> tokens) const = 0;
};

// Closed-class lexicon, then suffix rules, then NN. Good enough to give the
// POS channel a stylistic signal; supply pre-tagged input for accuracy.
class RuleTagger final : public PosTagger {
 public:
  RuleTagger() {
    auto add = [this](std::string_view tag, std::initializer_list<std::string_view> words) {
      for (auto w : words) lexicon_.emplace(std::string(w), std::string(tag));
    };
    add("DT", {"the", "a", "an", "this", "that", "these", "those", "every", "each", "all", "some", "any", "no",
               "another", "both", "either", "neither"});
    add("IN", {"of", "in", "on", "at", "by", "for", "with", "from", "about", "into", "during", "after", "before",
               "between", "through", "against", "under", "over", "without", "within", "among", "since", "until",
               "because", "although", "while", "if", "whether", "than", "as", "upon", "despite", "toward",
               "towards", "across", "behind", "beyond", "near"});
    add("CC", {"and", "or", "but", "nor", "yet", "so", "plus"});
    add("TO", {"to"});
    add("PRP", {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "himself",
                "herself", "itself", "themselves", "myself", "ourselves", "yourself"});
    add("PRP$", {"my", "your", "his", "its", "our", "their"});
    add("MD", {"can", "could", "may", "might", "must", "shall", "should", "will", "would"});
    add("WDT", {"which", "whatever"});
    add("WP", {"who", "whom", "what", "whoever"});
    add("WP$", {"whose"});
    add("WRB", {"when", "where", "why", "how"});
    add("EX", {"there"});
    add("RB", {"not", "n't", "very", "also", "too", "often", "never", "always", "just", "still", "already",
               "even", "only", "however", "perhaps", "almost", "quite", "rather", "here", "then", "now", "ever",
               "again", "soon"});
    add("VBD", {"was", "were", "had", "did", "said", "became", "made", "took", "went", "came", "began", "gave",
                "found", "won", "lost", "built", "held", "led", "left", "saw"});
    add("VBZ", {"is", "has", "does", "says"});
    add("VBP", {"are", "have", "do", "am"});
    add("VB", {"be", "make", "take", "get", "go", "become"});
    add("VBN", {"been", "done", "known", "born", "seen", "given", "taken", "written", "shown"});
    add("VBG", {"being", "having"});
    add("JJ", {"good", "bad", "new", "old", "great", "high", "large", "small", "important", "many", "much",
               "other", "such", "same", "few", "own", "first", "last", "early", "late", "major", "best", "worst"});
    add("POS", {"'s"});
    add("CD", {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "hundred",
               "thousand", "million", "billion"});
    add(".", {".", "!", "?"});
    add(",", {","});
    add(":", {":", ";", "--", "-"});
    add("''", {"\"", "'", "''"});
    add("``", {"``", "`"});
    add("-LRB-", {"(", "[", "{"});
    add("-RRB-", {")", "]", "}"});
    add("$", {"$"});
    add("SYM", {"%", "&"});
  }

  std::vector<std::string> tag(std::span<const std::string> tokens) const override {
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) tags.push_back(tag_token(tokens[i], i == 0));
    return tags;
  }

  std::string tag_token(std::string_view token, bool sentence_initial) const {
    const std::string lower = lowercase(token);
    if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;
    if (is_number(token)) return "CD";
    if (!sentence_initial && std::isupper(static_cast<unsigned char>(token.front()))) return "NNP";
    auto ends = [&](std::string_view suffix) {
      return lower.size() > suffix.size() + 1 && lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends("ing")) return "VBG";
    if (ends("ed")) return "VBD";
    if (ends("ly")) return "RB";
    if (ends("est")) return "JJS";
    if (ends("ous") || ends("ful") || ends("ive") || ends("able") || ends("ible") || ends("al") || ends("ic") ||
        ends("less") || ends("ish")) {
      return "JJ";
    }
    if (ends("tion") || ends("sion") || ends("ment") || ends("ness") || ends("ity") || ends("ism")) return "NN";
    if (ends("s") && !ends("ss") && !ends("us") && !ends("is")) return "NNS";
    return "NN";
  }

 private:
  static bool is_number(std::string_view t) {
    bool digit = false;
    for (char c : t) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digit = true;
      } else if (c != '.' && c != ',' && c != '-') {
        return false;
      }
    }
    return digit;
  }

  std::unordered_map<std::string, std::string> lexicon_;
};

// Tags supplied with the input, returned verbatim.
class PretaggedTagger final : public PosTagger {
 public:
  explicit PretaggedTagger(std::vector<std::string> tags) : tags_(std::move(tags)) {}

  std::vector<std::string> tag(std::span<const std::string> tokens) const override {
    if (tokens.size() != tags_.size()) {
      throw AlignmentError("pre-tagged input has " + std::to_string(tags_.size()) + " tags for " +
                           std::to_string(tokens.size()) + " tokens");
    }
    return tags_;
  }

 private:
  std::vector<std::string> tags_;
};

}  // namespace biaslang
