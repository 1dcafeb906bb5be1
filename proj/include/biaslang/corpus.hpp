#pragma once

// Labeled statement corpora: judgment filtering, the three neutral-sourcing
// regimes (cw-hard, featured, type-balanced) and the 70/10/20 split.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biaslang/error.hpp"
#include "biaslang/jsonl.hpp"
#include "biaslang/random.hpp"

namespace biaslang {

enum class Label { Biased, Neutral };
enum class Rating { Neutral, Biased, DontKnow };
enum class Source { CrowdPov, FeaturedArticle };
enum class Regime { CwHard, Featured, TypeBalanced };

inline std::string to_string(Label l) { return l == Label::Biased ? "biased" : "neutral"; }

inline std::string to_string(Rating r) {
  switch (r) {
    case Rating::Neutral: return "neutral";
    case Rating::Biased: return "biased";
    case Rating::DontKnow: return "dont_know";
  }
  return "dont_know";
}

inline std::string to_string(Source s) { return s == Source::CrowdPov ? "crowd_pov" : "featured"; }

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::CwHard: return "cw-hard";
    case Regime::Featured: return "featured";
    case Regime::TypeBalanced: return "type-balanced";
  }
  return "cw-hard";
}

inline Label parse_label(const std::string& s) {
  if (s == "biased") return Label::Biased;
  if (s == "neutral") return Label::Neutral;
  throw ValidationError("unknown label '" + s + "'");
}

inline Rating parse_rating(const std::string& s) {
  if (s == "neutral") return Rating::Neutral;
  if (s == "biased") return Rating::Biased;
  if (s == "dont_know") return Rating::DontKnow;
  throw ValidationError("unknown rating '" + s + "'");
}

inline Source parse_source(const std::string& s) {
  if (s == "crowd_pov") return Source::CrowdPov;
  if (s == "featured") return Source::FeaturedArticle;
  throw ValidationError("unknown source '" + s + "'");
}

inline Regime parse_regime(const std::string& s) {
  if (s == "cw-hard") return Regime::CwHard;
  if (s == "featured") return Regime::Featured;
  if (s == "type-balanced") return Regime::TypeBalanced;
  throw ValidationError("unknown regime '" + s + "'");
}

struct LabeledStatement {
  std::string id;
  std::string text;
  Label label = Label::Neutral;
  double confidence = 1.0;
  std::string article_type;
  Source source = Source::CrowdPov;
  std::vector<std::string> pos;  // optional pre-assigned POS tags

  friend bool operator==(const LabeledStatement&, const LabeledStatement&) = default;
};

inline void validate(const LabeledStatement& s) {
  if (s.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("statement '" + s.id + "' has empty text");
  }
  if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) {
    throw ValidationError("statement '" + s.id + "' confidence outside [0,1]");
  }
  if (s.source == Source::FeaturedArticle && s.label != Label::Neutral) {
    throw ValidationError("featured-article statement '" + s.id + "' must be neutral");
  }
}

inline json to_json(const LabeledStatement& s) {
  json j = {{"id", s.id},
            {"text", s.text},
            {"label", to_string(s.label)},
            {"confidence", s.confidence},
            {"article_type", s.article_type},
            {"source", to_string(s.source)}};
  if (!s.pos.empty()) j["pos"] = s.pos;
  return j;
}

inline LabeledStatement statement_from_json(const json& j) {
  LabeledStatement s;
  s.id = id_string(j.at("id"));
  s.text = j.at("text").get<std::string>();
  s.label = parse_label(j.at("label").get<std::string>());
  s.confidence = j.value("confidence", 1.0);
  s.article_type = j.value("article_type", std::string());
  s.source = parse_source(j.value("source", std::string("crowd_pov")));
  if (j.contains("pos")) s.pos = j.at("pos").get<std::vector<std::string>>();
  validate(s);
  return s;
}

inline std::vector<LabeledStatement> read_corpus(const std::string& path) {
  std::vector<LabeledStatement> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      out.push_back(statement_from_json(j));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), line);
    }
  });
  return out;
}

inline void write_corpus(std::ostream& out, std::span<const LabeledStatement> data) {
  for (const auto& s : data) out << to_json(s).dump() << '\n';
}

inline void write_corpus(const std::string& path, std::span<const LabeledStatement> data) {
  auto out = open_output(path);
  write_corpus(out, data);
}

// ---------------------------------------------------------------------------
// Judgments

struct JudgmentTable {
  std::vector<std::string> items;
  std::vector<std::string> workers;
  std::map<std::pair<std::string, std::string>, Rating> ratings;  // (worker, item)

  void add(const std::string& worker, const std::string& item, Rating r) {
    if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(item);
    if (std::find(workers.begin(), workers.end(), worker) == workers.end()) workers.push_back(worker);
    ratings[{worker, item}] = r;
  }

  // Ratings of one item in worker order.
  std::vector<Rating> ratings_for(const std::string& item) const {
    std::vector<Rating> out;
    for (const auto& w : workers) {
      auto it = ratings.find({w, item});
      if (it != ratings.end()) out.push_back(it->second);
    }
    return out;
  }
};

inline JudgmentTable read_judgments(const std::string& path) {
  JudgmentTable t;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      t.add(id_string(j.at("worker_id")), id_string(j.at("item_id")), parse_rating(j.at("rating").get<std::string>()));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), line);
    }
  });
  return t;
}

// Platform-side aggregate for one item, plus the metadata needed to turn
// it into a LabeledStatement.
struct Aggregate {
  Rating label = Rating::DontKnow;
  double confidence = 0.0;
  std::string text;
  std::string article_type;
};

struct ItemInfo {
  std::string text;
  std::string article_type;
};

inline constexpr double kMinConfidence = 0.6;

// Stand-in aggregation when the platform report is unavailable: majority
// rating, confidence = share of judgments agreeing with it. Ties go to the
// first rating in Neutral, Biased, DontKnow order.
inline std::map<std::string, Aggregate> aggregate_majority(const JudgmentTable& table,
                                                           const std::map<std::string, ItemInfo>& info) {
  std::map<std::string, Aggregate> out;
  for (const auto& item : table.items) {
    auto rs = table.ratings_for(item);
    std::array<std::size_t, 3> counts{};
    for (auto r : rs) ++counts[static_cast<std::size_t>(r)];
    auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    Aggregate a;
    a.label = static_cast<Rating>(best);
    a.confidence = rs.empty() ? 0.0 : static_cast<double>(counts[best]) / static_cast<double>(rs.size());
    if (auto it = info.find(item); it != info.end()) {
      a.text = it->second.text;
      a.article_type = it->second.article_type;
    }
    out[item] = std::move(a);
  }
  return out;
}

// Drops "don't know" items and items below the confidence threshold.
inline std::vector<LabeledStatement> filter_judgments(const JudgmentTable& table,
                                                      const std::map<std::string, Aggregate>& aggregated) {
  std::vector<LabeledStatement> out;
  for (const auto& item : table.items) {
    auto it = aggregated.find(item);
    if (it == aggregated.end()) throw ValidationError("no aggregated judgment for item '" + item + "'");
    const Aggregate& a = it->second;
    if (a.label == Rating::DontKnow || a.confidence < kMinConfidence) continue;
    LabeledStatement s;
    s.id = item;
    s.text = a.text;
    s.label = a.label == Rating::Biased ? Label::Biased : Label::Neutral;
    s.confidence = a.confidence;
    s.article_type = a.article_type;
    s.source = Source::CrowdPov;
    validate(s);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regimes and splits

namespace detail {

// Largest-remainder apportionment of `total` over quotas num[i]/den, each
// share capped at cap[i]. Ties go to the lower index.
inline std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& num, std::size_t den,
                                          const std::vector<std::size_t>& cap) {
  std::vector<std::size_t> share(num.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    share[i] = std::min(num[i] / den, cap[i]);
    assigned += share[i];
  }
  std::vector<std::size_t> order(num.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return num[a] % den > num[b] % den; });
  while (assigned < total) {
    bool progressed = false;
    for (auto i : order) {
      if (assigned == total) break;
      if (share[i] < cap[i]) {
        ++share[i];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return share;
}

// k distinct indices from [0, n), returned ascending.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

// Neutral side of a dataset regime. Featured and type-balanced samples have
// |biased| statements; type-balanced strata follow the article_type
// histogram of the biased set.
inline std::vector<LabeledStatement> build_regime(std::span<const LabeledStatement> biased,
                                                  std::span<const LabeledStatement> neutral_pool, Regime regime,
                                                  std::uint64_t seed) {
  if (neutral_pool.empty()) throw ValidationError("neutral pool is empty");
  if (regime == Regime::CwHard) return {neutral_pool.begin(), neutral_pool.end()};

  Rng rng(seed);
  const std::size_t target = biased.size();
  if (regime == Regime::Featured) {
    if (neutral_pool.size() < target) throw StratumExhausted("featured", target, neutral_pool.size());
    std::vector<LabeledStatement> out;
    for (auto i : detail::sample_indices(neutral_pool.size(), target, rng)) out.push_back(neutral_pool[i]);
    return out;
  }

  std::map<std::string, std::size_t> histogram;
  for (const auto& s : biased) ++histogram[s.article_type];
  std::vector<std::string> types;
  std::vector<std::size_t> num, cap;
  for (const auto& [type, count] : histogram) {
    types.push_back(type);
    num.push_back(target * count);
    cap.push_back(target);
  }
  auto need = detail::apportion(target, num, std::max<std::size_t>(biased.size(), 1), cap);

  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < neutral_pool.size(); ++i) strata[neutral_pool[i].article_type].push_back(i);

  std::vector<std::size_t> chosen;
  for (std::size_t t = 0; t < types.size(); ++t) {
    const auto& pool = strata[types[t]];
    if (pool.size() < need[t]) throw StratumExhausted(types[t], need[t], pool.size());
    for (auto i : detail::sample_indices(pool.size(), need[t], rng)) chosen.push_back(pool[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<LabeledStatement> out;
  for (auto i : chosen) out.push_back(neutral_pool[i]);
  return out;
}

// Full dataset of a regime: every biased statement followed by the sampled
// neutral side.
inline std::vector<LabeledStatement> regime_dataset(std::span<const LabeledStatement> biased,
                                                    std::span<const LabeledStatement> neutral_pool, Regime regime,
                                                    std::uint64_t seed) {
  std::vector<LabeledStatement> out(biased.begin(), biased.end());
  auto neutral = build_regime(biased, neutral_pool, regime, seed);
  out.insert(out.end(), std::make_move_iterator(neutral.begin()), std::make_move_iterator(neutral.end()));
  return out;
}

struct DatasetSplit {
  std::vector<LabeledStatement> train;
  std::vector<LabeledStatement> validation;
  std::vector<LabeledStatement> test;
  std::uint64_t seed = 0;
};

// Label-stratified 70/10/20 split. Split sizes are round(0.7n), round(0.1n)
// and the rest; each label's share is apportioned by largest remainder.
inline DatasetSplit split(std::span<const LabeledStatement> data, std::uint64_t seed) {
  if (data.size() < 10) throw ValidationError("split needs at least 10 statements");
  const std::size_t n = data.size();
  const std::size_t n_train = (7 * n + 5) / 10;
  const std::size_t n_val = (n + 5) / 10;

  std::array<std::vector<std::size_t>, 2> strata;  // biased, neutral
  for (std::size_t i = 0; i < n; ++i) strata[data[i].label == Label::Biased ? 0 : 1].push_back(i);

  std::vector<std::size_t> sizes = {strata[0].size(), strata[1].size()};
  auto train_share = detail::apportion(n_train, {7 * sizes[0], 7 * sizes[1]}, 10, sizes);
  std::vector<std::size_t> room = {sizes[0] - train_share[0], sizes[1] - train_share[1]};
  auto val_share = detail::apportion(n_val, {sizes[0], sizes[1]}, 10, room);

  DatasetSplit out;
  out.seed = seed;
  Rng rng(seed);
  for (std::size_t s = 0; s < 2; ++s) {
    auto& idx = strata[s];
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& item = data[idx[k]];
      if (k < train_share[s]) {
        out.train.push_back(item);
      } else if (k < train_share[s] + val_share[s]) {
        out.validation.push_back(item);
      } else {
        out.test.push_back(item);
      }
    }
  }
  return out;
}

}  // namespace biaslang
