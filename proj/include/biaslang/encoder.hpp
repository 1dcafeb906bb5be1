#pragma once

// Statement -> three aligned id sequences (word, POS, lexicon category)
// padded or truncated to a fixed length.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "biaslang/corpus.hpp"
#include "biaslang/error.hpp"
#include "biaslang/lexicon.hpp"
#include "biaslang/pos_tagger.hpp"
#include "biaslang/tokenizer.hpp"
#include "biaslang/vocabulary.hpp"

namespace biaslang {

enum class Channel { Word = 0, Pos = 1, Liwc = 2 };
inline constexpr std::array<Channel, 3> kAllChannels = {Channel::Word, Channel::Pos, Channel::Liwc};

inline std::string to_string(Channel c) {
  switch (c) {
    case Channel::Word: return "word";
    case Channel::Pos: return "pos";
    case Channel::Liwc: return "liwc";
  }
  return "word";
}

// Which channels draw their embeddings from one shared matrix.
enum class WeightSharing { Separate, SharePosLiwc, ShareAll };

inline std::string to_string(WeightSharing s) {
  switch (s) {
    case WeightSharing::Separate: return "separate";
    case WeightSharing::SharePosLiwc: return "pos-liwc";
    case WeightSharing::ShareAll: return "all";
  }
  return "separate";
}

inline WeightSharing parse_weight_sharing(const std::string& s) {
  if (s == "separate") return WeightSharing::Separate;
  if (s == "pos-liwc") return WeightSharing::SharePosLiwc;
  if (s == "all") return WeightSharing::ShareAll;
  throw ConfigError("unknown weight sharing '" + s + "'");
}

inline constexpr std::size_t kDefaultMaxLen = 64;

struct EncodedStatement {
  std::vector<std::int32_t> word_ids;
  std::vector<std::int32_t> pos_ids;
  std::vector<std::int32_t> liwc_ids;
  std::vector<std::uint8_t> mask;  // 1 at real tokens
  std::size_t length = 0;          // number of real tokens, <= max_len

  std::span<const std::int32_t> ids(Channel c) const {
    switch (c) {
      case Channel::Word: return word_ids;
      case Channel::Pos: return pos_ids;
      case Channel::Liwc: return liwc_ids;
    }
    return word_ids;
  }

  friend bool operator==(const EncodedStatement&, const EncodedStatement&) = default;
};

// Owns the vocabularies and the category lexicon. Under weight sharing the
// shared channels index one combined vocabulary; POS and category symbols
// are namespaced ("pos:NN", "liwc:anger") so they never collide with words.
class StatementEncoder {
 public:
  static constexpr std::string_view kPosPrefix = "pos:";
  static constexpr std::string_view kLiwcPrefix = "liwc:";
  static constexpr std::string_view kNoCategorySymbol = "liwc:<none>";

  StatementEncoder(CategoryLexicon lexicon, std::size_t max_len = kDefaultMaxLen,
                   WeightSharing sharing = WeightSharing::Separate)
      : lexicon_(std::move(lexicon)), max_len_(max_len), sharing_(sharing) {
    if (max_len_ == 0) throw ConfigError("max_len must be positive");
    if (!lexicon_.empty()) descriptiveness_ = compute_descriptiveness(lexicon_);
    switch (sharing_) {
      case WeightSharing::Separate: channel_table_ = {0, 1, 2}; break;
      case WeightSharing::SharePosLiwc: channel_table_ = {0, 1, 1}; break;
      case WeightSharing::ShareAll: channel_table_ = {0, 0, 0}; break;
    }
    tables_.resize(static_cast<std::size_t>(*std::max_element(channel_table_.begin(), channel_table_.end())) + 1);
  }

  // Builds vocabularies from training statements only. Words first, then
  // POS tags, then every lexicon category, so shared tables stay grouped.
  void fit(std::span<const LabeledStatement> train) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(train.size());
    for (const auto& s : train) tokens.push_back(tokenize(s.text));
    for (const auto& toks : tokens) {
      for (const auto& t : toks) mutable_table(Channel::Word).add(lowercase(t));
    }
    for (std::size_t i = 0; i < train.size(); ++i) {
      for (const auto& tag : tags_for(tokens[i], train[i].pos)) mutable_table(Channel::Pos).add(pos_symbol(tag));
    }
    mutable_table(Channel::Liwc).add(std::string(kNoCategorySymbol));
    for (const auto& c : lexicon_.categories()) mutable_table(Channel::Liwc).add(liwc_symbol(c));
  }

  EncodedStatement encode(std::string_view text, std::span<const std::string> pretagged = {}) const {
    auto tokens = tokenize(text);
    auto tags = tags_for(tokens, pretagged);
    return encode_tokens(tokens, tags);
  }

  EncodedStatement encode(const LabeledStatement& s) const { return encode(s.text, s.pos); }

  EncodedStatement encode_tokens(std::span<const std::string> tokens, std::span<const std::string> tags) const {
    if (tags.size() != tokens.size()) throw AlignmentError("token/tag count mismatch");
    EncodedStatement e;
    e.word_ids.assign(max_len_, Vocabulary::kPad);
    e.pos_ids.assign(max_len_, Vocabulary::kPad);
    e.liwc_ids.assign(max_len_, Vocabulary::kPad);
    e.mask.assign(max_len_, 0);
    e.length = std::min(tokens.size(), max_len_);
    for (std::size_t t = 0; t < e.length; ++t) {
      e.word_ids[t] = table(Channel::Word).lookup(lowercase(tokens[t]));
      e.pos_ids[t] = table(Channel::Pos).lookup(pos_symbol(tags[t]));
      e.liwc_ids[t] = table(Channel::Liwc).lookup(category_symbol(tokens[t]));
      e.mask[t] = 1;
    }
    return e;
  }

  // Tokens as the model sees them (after truncation).
  std::vector<std::string> model_tokens(std::string_view text) const {
    auto tokens = tokenize(text);
    if (tokens.size() > max_len_) tokens.resize(max_len_);
    return tokens;
  }

  std::string category_symbol(std::string_view token) const {
    int c = liwc_assign(token, lexicon_, descriptiveness_);
    return c == CategoryLexicon::kNoCategory ? std::string(kNoCategorySymbol)
                                             : liwc_symbol(lexicon_.categories()[static_cast<std::size_t>(c)]);
  }

  const Vocabulary& table(Channel c) const { return tables_[table_index(c)]; }
  std::size_t table_index(Channel c) const { return channel_table_[static_cast<std::size_t>(c)]; }
  std::size_t table_count() const { return tables_.size(); }
  const Vocabulary& table_at(std::size_t i) const { return tables_.at(i); }
  std::size_t max_len() const { return max_len_; }
  WeightSharing sharing() const { return sharing_; }
  const CategoryLexicon& lexicon() const { return lexicon_; }
  const std::map<std::string, double>& descriptiveness() const { return descriptiveness_; }

  nlohmann::json to_json() const {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : tables_) tables.push_back(t.entries());
    return {{"max_len", max_len_}, {"sharing", to_string(sharing_)}, {"tables", tables}, {"lexicon", lexicon_.to_json()}};
  }

  static StatementEncoder from_json(const nlohmann::json& j) {
    StatementEncoder enc(CategoryLexicon::from_json(j.at("lexicon")), j.at("max_len").get<std::size_t>(),
                         parse_weight_sharing(j.at("sharing").get<std::string>()));
    const auto& tables = j.at("tables");
    if (tables.size() != enc.tables_.size()) throw FormatError("encoder table count does not match sharing mode", 0);
    for (std::size_t i = 0; i < tables.size(); ++i) enc.tables_[i] = Vocabulary(tables[i].get<std::vector<std::string>>());
    return enc;
  }

 private:
  static std::string pos_symbol(std::string_view tag) { return std::string(kPosPrefix) + std::string(tag); }
  static std::string liwc_symbol(std::string_view cat) { return std::string(kLiwcPrefix) + std::string(cat); }

  std::vector<std::string> tags_for(std::span<const std::string> tokens, std::span<const std::string> pretagged) const {
    if (!pretagged.empty()) {
      return PretaggedTagger(std::vector<std::string>(pretagged.begin(), pretagged.end())).tag(tokens);
    }
    return tagger_.tag(tokens);
  }

  Vocabulary& mutable_table(Channel c) { return tables_[table_index(c)]; }

  CategoryLexicon lexicon_;
  std::map<std::string, double> descriptiveness_;
  std::size_t max_len_;
  WeightSharing sharing_;
  std::array<std::size_t, 3> channel_table_{};
  std::vector<Vocabulary> tables_;
  RuleTagger tagger_;
};

// Free-function form for one-off encodings.
inline EncodedStatement encode_statement(std::string_view text, const StatementEncoder& encoder) {
  return encoder.encode(text);
}

}  // namespace biaslang
