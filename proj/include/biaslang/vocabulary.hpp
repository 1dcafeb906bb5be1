#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "biaslang/error.hpp"
#include "biaslang/numerics/tensor.hpp"
#include "biaslang/random.hpp"

namespace biaslang {

// Symbol <-> row index. Row 0 is padding, row 1 stands in for unknown
// symbols.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;

  Vocabulary() : entries_{"<pad>", "<unk>"} {
    index_.emplace(entries_[0], kPad);
    index_.emplace(entries_[1], kUnk);
  }

  explicit Vocabulary(const std::vector<std::string>& entries) : Vocabulary() {
    for (std::size_t i = 2; i < entries.size(); ++i) add(entries[i]);
  }

  std::int32_t add(const std::string& symbol) {
    auto [it, inserted] = index_.emplace(symbol, static_cast<std::int32_t>(entries_.size()));
    if (inserted) entries_.push_back(symbol);
    return it->second;
  }

  std::int32_t lookup(const std::string& symbol) const {
    auto it = index_.find(symbol);
    return it == index_.end() ? kUnk : it->second;
  }

  bool contains(const std::string& symbol) const { return index_.count(symbol) != 0; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& entries() const { return entries_; }
  const std::string& symbol(std::size_t i) const { return entries_.at(i); }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, std::int32_t> index_;
};

inline constexpr double kEmbeddingInitRange = 0.05;

struct EmbeddingMatrix {
  std::string name;
  std::size_t dim = 100;
  ad::Tensor weights;
  bool trainable = true;
};

// Every row uniform in [-0.05, 0.05] except the all-zero padding row.
inline EmbeddingMatrix random_embeddings(std::string name, const Vocabulary& vocab, std::size_t dim, Rng& rng) {
  EmbeddingMatrix m{std::move(name), dim, ad::Tensor::matrix(vocab.size(), dim), true};
  for (auto& v : m.weights.values()) v = rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
  for (auto& v : m.weights.row(Vocabulary::kPad)) v = 0.0;
  return m;
}

struct EmbeddingLoadStats {
  std::size_t lines = 0;
  std::size_t matched = 0;
};

// GloVe text format: "<token> f1 ... f_dim" per line. Vocabulary symbols
// found in the file get the file vector; the rest keep the seeded random
// initialisation. Every line is checked for the expected dimension.
inline EmbeddingMatrix load_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t dim,
                                       std::uint64_t seed, EmbeddingLoadStats* stats = nullptr) {
  Rng rng(seed);
  EmbeddingMatrix m = random_embeddings("word", vocab, dim, rng);
  std::string line;
  std::size_t lineno = 0;
  EmbeddingLoadStats local;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    values.reserve(dim);
    std::string f;
    while (fields >> f) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw FormatError("embedding value '" + f + "' is not a number", lineno);
      }
    }
    if (values.size() != dim) {
      throw FormatError("embedding has " + std::to_string(values.size()) + " values, expected " + std::to_string(dim),
                        lineno);
    }
    ++local.lines;
    if (!vocab.contains(token)) continue;
    const auto row = static_cast<std::size_t>(vocab.lookup(token));
    if (row == static_cast<std::size_t>(Vocabulary::kPad)) continue;
    std::copy(values.begin(), values.end(), m.weights.row(row).begin());
    ++local.matched;
  }
  if (stats) *stats = local;
  return m;
}

inline EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab, std::size_t dim,
                                       std::uint64_t seed, EmbeddingLoadStats* stats = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embeddings " + path);
  return load_embeddings(in, vocab, dim, seed, stats);
}

}  // namespace biaslang
