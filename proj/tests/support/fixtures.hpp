#pragma once

// Small models and corpora shared by the unit and acceptance suites.

#include <sstream>
#include <string>
#include <vector>

#include "biaslang/corpus.hpp"
#include "biaslang/encoder.hpp"
#include "biaslang/lexicon.hpp"
#include "biaslang/models.hpp"
#include "biaslang/random.hpp"
#include "biaslang/train_eval.hpp"

namespace support {

using namespace biaslang;

inline CategoryLexicon toy_lexicon() {
  std::istringstream in(
      "w1*\tc0\n"
      "w2*\tc1,c2\n"
      "w3\tc2\n"
      "w4\tc3\n"
      "w5*\tc3,c4\n"
      "w7\tc0,c4\n");
  return CategoryLexicon::parse(in);
}

// 48 distinct words w0..w47 (each appears at least once), so a word table
// fitted on this corpus has exactly 50 rows with padding and unknown.
inline std::vector<LabeledStatement> toy_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledStatement> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledStatement s;
    s.id = "t" + std::to_string(i);
    std::string text;
    const std::size_t len = i < 16 ? 3 : 1 + rng.index(8);
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t word = i < 16 ? i * 3 + k : rng.index(48);
      text += (k ? " w" : "w") + std::to_string(word);
    }
    s.text = text;
    s.label = rng.uniform() < 0.5 ? Label::Biased : Label::Neutral;
    s.article_type = "type" + std::to_string(rng.index(3));
    out.push_back(std::move(s));
  }
  return out;
}

struct ToyOptions {
  Architecture architecture = Architecture::GlobalAttention;
  std::vector<Channel> channels = {Channel::Word, Channel::Pos, Channel::Liwc};
  WeightSharing sharing = WeightSharing::Separate;
  std::size_t dim = 8;
  std::size_t max_len = 6;
  std::uint64_t seed = 1;
  // Spread every trainable tensor over [−1, 1] instead of the training
  // initialisation (zero biases would hide bias gradients).
  bool scramble = true;
};

inline Model toy_model(const ToyOptions& o) {
  ModelConfig config;
  config.architecture = o.architecture;
  config.channels = o.channels;
  config.embed_dim = o.dim;
  config.hidden_dim = o.dim;
  config.attn_dim = o.dim;
  config.max_len = o.max_len;
  config.weight_sharing = o.sharing;
  config.seed = o.seed;
  StatementEncoder encoder(toy_lexicon(), o.max_len, o.sharing);
  const auto corpus = toy_corpus(64, 99);
  encoder.fit(corpus);
  Model model{init_params(config, encoder), std::move(encoder)};
  if (o.scramble) {
    Rng rng(o.seed ^ 0x5eedULL);
    model.params.for_each([&](const std::string& name, ad::Tensor& t, bool) {
      const bool embedding = name.rfind("embedding.", 0) == 0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (embedding && i < t.cols()) continue;  // padding row stays zero
        t[i] = rng.uniform(-1.0, 1.0);
      }
    });
  }
  return model;
}

// Random ids drawn from the model's own table sizes, skipping padding.
inline EncodedStatement random_encoded(Rng& rng, const ModelParams& p, std::size_t min_len = 1) {
  const std::size_t M = p.config.max_len;
  EncodedStatement e;
  e.word_ids.assign(M, 0);
  e.pos_ids.assign(M, 0);
  e.liwc_ids.assign(M, 0);
  e.mask.assign(M, 0);
  e.length = min_len + rng.index(M - min_len + 1);
  for (auto c : p.config.channels) {
    const std::size_t rows = p.embedding(c).weights.rows();
    auto& ids = c == Channel::Word ? e.word_ids : c == Channel::Pos ? e.pos_ids : e.liwc_ids;
    for (std::size_t t = 0; t < e.length; ++t) ids[t] = static_cast<std::int32_t>(1 + rng.index(rows - 1));
  }
  for (std::size_t t = 0; t < e.length; ++t) e.mask[t] = 1;
  return e;
}

// Biased statements carry 2 of 10 marker tokens at random positions among
// 20 filler tokens; neutral statements are 22 filler tokens, so length
// carries no signal.
inline std::vector<LabeledStatement> synthetic_corpus(std::size_t n, std::uint64_t seed, std::size_t fillers = 100) {
  Rng rng(seed);
  std::vector<LabeledStatement> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool biased = i % 2 == 0;
    std::vector<std::string> tokens;
    for (int k = 0; k < (biased ? 20 : 22); ++k) tokens.push_back("filler" + std::to_string(rng.index(fillers)));
    if (biased) {
      const std::size_t a = rng.index(10);
      std::size_t b = rng.index(9);
      if (b >= a) ++b;
      for (std::size_t marker : {a, b}) {
        const std::size_t pos = rng.index(tokens.size() + 1);
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), "marker" + std::to_string(marker));
      }
    }
    std::string text;
    for (const auto& t : tokens) text += (text.empty() ? "" : " ") + t;
    LabeledStatement s;
    s.id = "s" + std::to_string(i);
    s.text = text;
    s.label = biased ? Label::Biased : Label::Neutral;
    s.article_type = "synthetic";
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace support
