#pragma once

// GRU encoders with optional global and hierarchical attention over the
// word / POS / lexicon-category channels. All forward passes are batched:
// a batch of B statements becomes T steps of (B × dim) matrices, with
// padded rows carried through unchanged.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "biaslang/corpus.hpp"
#include "biaslang/encoder.hpp"
#include "biaslang/error.hpp"
#include "biaslang/numerics/ops.hpp"
#include "biaslang/numerics/tape.hpp"
#include "biaslang/random.hpp"
#include "biaslang/vocabulary.hpp"

namespace biaslang {

using ad::Tape;
using ad::Tensor;
using ad::Var;

enum class Architecture { Vanilla, GlobalAttention, HierarchicalAttention };

inline std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::Vanilla: return "vanilla";
    case Architecture::GlobalAttention: return "global";
    case Architecture::HierarchicalAttention: return "hierarchical";
  }
  return "vanilla";
}

inline Architecture parse_architecture(const std::string& s) {
  if (s == "vanilla" || s == "rnn") return Architecture::Vanilla;
  if (s == "global" || s == "rnn_a") return Architecture::GlobalAttention;
  if (s == "hierarchical" || s == "rnn_h") return Architecture::HierarchicalAttention;
  throw ConfigError("unknown architecture '" + s + "'");
}

// "w", "wp", "wl", "wpl" in any letter order.
inline std::vector<Channel> parse_channels(const std::string& s) {
  std::array<bool, 3> seen{};
  for (char ch : s) {
    std::size_t k = 0;
    switch (ch) {
      case 'w': k = 0; break;
      case 'p': k = 1; break;
      case 'l': k = 2; break;
      default: throw ConfigError("unknown channel letter '" + std::string(1, ch) + "' in '" + s + "'");
    }
    if (seen[k]) throw ConfigError("channel letter '" + std::string(1, ch) + "' repeated in '" + s + "'");
    seen[k] = true;
  }
  std::vector<Channel> out;
  for (auto c : kAllChannels) {
    if (seen[static_cast<std::size_t>(c)]) out.push_back(c);
  }
  return out;
}

inline std::string channels_string(std::span<const Channel> channels) {
  std::string s;
  for (auto c : channels) s += c == Channel::Word ? 'w' : c == Channel::Pos ? 'p' : 'l';
  return s;
}

struct ModelConfig {
  Architecture architecture = Architecture::GlobalAttention;
  std::vector<Channel> channels = {Channel::Word};
  std::size_t embed_dim = 100;
  std::size_t hidden_dim = 100;
  std::size_t attn_dim = 100;
  std::size_t max_len = kDefaultMaxLen;
  WeightSharing weight_sharing = WeightSharing::Separate;
  bool pretrained_words = false;
  std::uint64_t seed = 0;

  bool uses(Channel c) const { return std::find(channels.begin(), channels.end(), c) != channels.end(); }

  void validate() const {
    if (channels.empty() || channels.front() != Channel::Word) throw ConfigError("channels must include word");
    for (std::size_t i = 1; i < channels.size(); ++i) {
      if (static_cast<int>(channels[i]) <= static_cast<int>(channels[i - 1])) {
        throw ConfigError("channels must be distinct and ordered word, pos, liwc");
      }
    }
    if (embed_dim == 0 || hidden_dim == 0 || attn_dim == 0 || max_len == 0) {
      throw ConfigError("model dimensions must be positive");
    }
    if (architecture == Architecture::HierarchicalAttention && channels.size() < 2) {
      throw ConfigError("hierarchical attention needs at least two channels");
    }
  }

  nlohmann::json to_json() const {
    return {{"architecture", to_string(architecture)},
            {"channels", channels_string(channels)},
            {"embed_dim", embed_dim},
            {"hidden_dim", hidden_dim},
            {"attn_dim", attn_dim},
            {"max_len", max_len},
            {"weight_sharing", to_string(weight_sharing)},
            {"pretrained_words", pretrained_words},
            {"seed", seed}};
  }

  static ModelConfig from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.architecture = parse_architecture(j.at("architecture").get<std::string>());
    c.channels = parse_channels(j.at("channels").get<std::string>());
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    c.attn_dim = j.at("attn_dim").get<std::size_t>();
    c.max_len = j.at("max_len").get<std::size_t>();
    c.weight_sharing = parse_weight_sharing(j.at("weight_sharing").get<std::string>());
    c.pretrained_words = j.at("pretrained_words").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

namespace detail {

inline Tensor glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t = Tensor::matrix(rows, cols);
  for (auto& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace detail

struct GruParams {
  Tensor W_z, W_r, W_h;  // hidden × input
  Tensor U_z, U_r, U_h;  // hidden × hidden
  Tensor b_z, b_r, b_h;  // hidden

  std::size_t hidden_dim() const { return W_z.rows(); }
  std::size_t input_dim() const { return W_z.cols(); }

  static GruParams zeros(std::size_t input, std::size_t hidden) {
    return {Tensor::matrix(hidden, input), Tensor::matrix(hidden, input), Tensor::matrix(hidden, input),
            Tensor::matrix(hidden, hidden), Tensor::matrix(hidden, hidden), Tensor::matrix(hidden, hidden),
            Tensor::vector(hidden),         Tensor::vector(hidden),         Tensor::vector(hidden)};
  }

  static GruParams glorot(std::size_t input, std::size_t hidden, Rng& rng) {
    GruParams p = zeros(input, hidden);
    p.W_z = detail::glorot(hidden, input, rng);
    p.W_r = detail::glorot(hidden, input, rng);
    p.W_h = detail::glorot(hidden, input, rng);
    p.U_z = detail::glorot(hidden, hidden, rng);
    p.U_r = detail::glorot(hidden, hidden, rng);
    p.U_h = detail::glorot(hidden, hidden, rng);
    return p;
  }

  template <class F>
  void for_each(F&& f) {
    f("W_z", W_z); f("W_r", W_r); f("W_h", W_h);
    f("U_z", U_z); f("U_r", U_r); f("U_h", U_h);
    f("b_z", b_z); f("b_r", b_r); f("b_h", b_h);
  }
};

struct AttentionParams {
  Tensor W_emb;  // attn × hidden
  Tensor b_emb;  // attn
  Tensor c;      // attn

  static AttentionParams zeros(std::size_t hidden, std::size_t attn) {
    return {Tensor::matrix(attn, hidden), Tensor::vector(attn), Tensor::vector(attn)};
  }

  static AttentionParams init(std::size_t hidden, std::size_t attn, Rng& rng) {
    AttentionParams a = zeros(hidden, attn);
    a.W_emb = detail::glorot(attn, hidden, rng);
    for (auto& v : a.c.values()) v = rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
    return a;
  }

  template <class F>
  void for_each(F&& f) {
    f("W_emb", W_emb); f("b_emb", b_emb); f("c", c);
  }
};

// Parameter inventory of one model. Only the parts the architecture uses
// are populated.
struct ModelParams {
  ModelConfig config;
  std::vector<EmbeddingMatrix> embeddings;           // one per distinct table in use
  std::array<int, 3> channel_embedding{-1, -1, -1};  // channel -> index into embeddings
  std::vector<GruParams> encoders;                   // one, or one per channel (hierarchical)
  std::vector<AttentionParams> attentions;           // none, one, or one per channel
  std::optional<GruParams> top_encoder;
  std::optional<AttentionParams> top_attention;
  Tensor output_weight;  // 1 × hidden
  Tensor output_bias;    // {1}

  const EmbeddingMatrix& embedding(Channel c) const {
    int i = channel_embedding[static_cast<std::size_t>(c)];
    if (i < 0) throw ConfigError("channel " + to_string(c) + " is not configured");
    return embeddings[static_cast<std::size_t>(i)];
  }

  // Visits every tensor with a stable name, in a fixed order.
  template <class F>
  void for_each(F&& f) {
    for (auto& e : embeddings) f("embedding." + e.name, e.weights, e.trainable);
    for (std::size_t i = 0; i < encoders.size(); ++i) {
      encoders[i].for_each([&](const char* n, Tensor& t) { f(block_name("encoder", i) + "." + n, t, true); });
    }
    for (std::size_t i = 0; i < attentions.size(); ++i) {
      attentions[i].for_each([&](const char* n, Tensor& t) { f(block_name("attention", i) + "." + n, t, true); });
    }
    if (top_encoder) top_encoder->for_each([&](const char* n, Tensor& t) { f(std::string("top_encoder.") + n, t, true); });
    if (top_attention) {
      top_attention->for_each([&](const char* n, Tensor& t) { f(std::string("top_attention.") + n, t, true); });
    }
    f("output.weight", output_weight, true);
    f("output.bias", output_bias, true);
  }

  template <class F>
  void for_each(F&& f) const {
    const_cast<ModelParams*>(this)->for_each(
        [&](const std::string& n, Tensor& t, bool trainable) { f(n, static_cast<const Tensor&>(t), trainable); });
  }

  std::vector<Tensor*> trainable() {
    std::vector<Tensor*> out;
    for_each([&](const std::string&, Tensor& t, bool tr) {
      if (tr) out.push_back(&t);
    });
    return out;
  }

  std::vector<std::pair<std::string, const Tensor*>> named() const {
    std::vector<std::pair<std::string, const Tensor*>> out;
    for_each([&](const std::string& n, const Tensor& t, bool) { out.emplace_back(n, &t); });
    return out;
  }

 private:
  std::string block_name(const char* base, std::size_t i) const {
    if (config.architecture != Architecture::HierarchicalAttention) return base;
    return std::string(base) + "." + to_string(config.channels[i]);
  }
};

// Fresh parameters. Embedding tables come from the encoder's vocabularies;
// with pretrained_words the word table is read from `embeddings_path` and
// frozen unless it also hosts POS/category rows (ShareAll).
inline ModelParams init_params(const ModelConfig& config, const StatementEncoder& encoder,
                               const std::string& embeddings_path = {}) {
  config.validate();
  if (encoder.max_len() != config.max_len) throw ConfigError("encoder and model disagree on max_len");
  if (encoder.sharing() != config.weight_sharing) throw ConfigError("encoder and model disagree on weight sharing");
  if (config.pretrained_words && embeddings_path.empty()) throw ConfigError("pretrained_words needs an embeddings file");

  ModelParams p;
  p.config = config;
  Rng rng(config.seed);

  std::vector<int> table_slot(encoder.table_count(), -1);
  for (auto c : config.channels) {
    const std::size_t table = encoder.table_index(c);
    if (table_slot[table] < 0) {
      table_slot[table] = static_cast<int>(p.embeddings.size());
      const bool words = table == encoder.table_index(Channel::Word);
      std::string name = words ? "word" : to_string(c);
      if (words && config.pretrained_words) {
        EmbeddingMatrix m = load_embeddings(embeddings_path, encoder.table_at(table), config.embed_dim, rng.next());
        m.trainable = config.weight_sharing == WeightSharing::ShareAll;
        p.embeddings.push_back(std::move(m));
      } else {
        p.embeddings.push_back(random_embeddings(name, encoder.table_at(table), config.embed_dim, rng));
      }
      p.embeddings.back().name = name;
    }
    p.channel_embedding[static_cast<std::size_t>(c)] = table_slot[table];
  }

  const std::size_t H = config.hidden_dim;
  if (config.architecture == Architecture::HierarchicalAttention) {
    for (std::size_t i = 0; i < config.channels.size(); ++i) p.encoders.push_back(GruParams::glorot(config.embed_dim, H, rng));
    for (std::size_t i = 0; i < config.channels.size(); ++i) p.attentions.push_back(AttentionParams::init(H, config.attn_dim, rng));
    p.top_encoder = GruParams::glorot(H, H, rng);
    p.top_attention = AttentionParams::init(H, config.attn_dim, rng);
  } else {
    p.encoders.push_back(GruParams::glorot(config.embed_dim * config.channels.size(), H, rng));
    if (config.architecture == Architecture::GlobalAttention) p.attentions.push_back(AttentionParams::init(H, config.attn_dim, rng));
  }
  p.output_weight = detail::glorot(1, H, rng);
  p.output_bias = Tensor::vector(1);
  return p;
}

// ---- differentiable building blocks ----

struct BoundGru {
  Var W_z, W_r, W_h, U_z, U_r, U_h, b_z, b_r, b_h;
};

struct BoundAttention {
  Var W_emb, b_emb, c;
};

inline BoundGru bind(Tape& tape, const GruParams& p) {
  return {tape.parameter(p.W_z), tape.parameter(p.W_r), tape.parameter(p.W_h),
          tape.parameter(p.U_z), tape.parameter(p.U_r), tape.parameter(p.U_h),
          tape.parameter(p.b_z), tape.parameter(p.b_r), tape.parameter(p.b_h)};
}

inline BoundAttention bind(Tape& tape, const AttentionParams& a) {
  return {tape.parameter(a.W_emb), tape.parameter(a.b_emb), tape.parameter(a.c)};
}

// One GRU step on a batch: x is B × input, h_prev is B × hidden.
inline Var gru_step(Var x, Var h_prev, const BoundGru& p) {
  using namespace ad;
  Var z = sigmoid(add(add(matmul_bt(x, p.W_z), matmul_bt(h_prev, p.U_z)), p.b_z));
  Var r = sigmoid(add(add(matmul_bt(x, p.W_r), matmul_bt(h_prev, p.U_r)), p.b_r));
  Var candidate = ad::tanh(add(matmul_bt(x, p.W_h), hadamard(r, add(matmul_bt(h_prev, p.U_h), p.b_h))));
  return add(hadamard(one_minus(z), h_prev), hadamard(z, candidate));
}

// Value-only single-vector step, for inspection and tests.
inline Tensor gru_step(const Tensor& x, const Tensor& h_prev, const GruParams& p) {
  Tape tape;
  Var xv = tape.constant(Tensor({1, x.size()}, std::vector<double>(x.values().begin(), x.values().end())));
  Var hv = tape.constant(Tensor({1, h_prev.size()}, std::vector<double>(h_prev.values().begin(), h_prev.values().end())));
  BoundGru b{tape.constant(p.W_z), tape.constant(p.W_r), tape.constant(p.W_h), tape.constant(p.U_z), tape.constant(p.U_r),
             tape.constant(p.U_h), tape.constant(p.b_z), tape.constant(p.b_r), tape.constant(p.b_h)};
  const Tensor& out = gru_step(xv, hv, b).value();
  return Tensor({out.size()}, std::vector<double>(out.values().begin(), out.values().end()));
}

// masks[t][b] != 0 where statement b has a real token at step t.
inline std::vector<Var> encode_sequence(std::span<const Var> xs, const std::vector<std::vector<std::uint8_t>>& masks,
                                        const BoundGru& p) {
  if (xs.size() != masks.size()) throw ShapeError("encode_sequence: " + std::to_string(xs.size()) + " inputs for " +
                                                  std::to_string(masks.size()) + " mask steps");
  std::vector<Var> hs;
  if (xs.empty()) return hs;
  Tape& tape = *xs[0].tape;
  const std::size_t B = xs[0].value().rows();
  Var h = tape.constant(Tensor::matrix(B, p.W_z.value().rows()));
  hs.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    Var next = gru_step(xs[t], h, p);
    h = ad::select_rows(masks[t], next, h);
    hs.push_back(h);
  }
  return hs;
}

struct AttentionOutput {
  Var representation;  // B × hidden
  Var alpha;           // B × T
};

// Masked attention pooling over the step states.
inline AttentionOutput global_attention(std::span<const Var> hs, const std::vector<std::vector<std::uint8_t>>& masks,
                                        const BoundAttention& a) {
  using namespace ad;
  if (hs.empty()) throw DegenerateInput("attention over an empty sequence");
  const std::size_t B = hs[0].value().rows();
  const std::size_t T = hs.size();
  std::vector<std::uint8_t> flat(B * T);
  for (std::size_t b = 0; b < B; ++b) {
    bool any = false;
    for (std::size_t t = 0; t < T; ++t) {
      flat[b * T + t] = masks[t][b];
      any = any || masks[t][b];
    }
    if (!any) throw DegenerateInput("attention over a fully masked sequence");
  }
  std::vector<Var> scores;
  scores.reserve(T);
  for (const auto& h : hs) {
    Var u = ad::tanh(add(matmul_bt(h, a.W_emb), a.b_emb));
    scores.push_back(matvec(u, a.c));
  }
  Var alpha = softmax(concat(scores, 1), flat);
  Var rep = scale_rows(hs[0], column(alpha, 0));
  for (std::size_t t = 1; t < T; ++t) rep = add(rep, scale_rows(hs[t], column(alpha, t)));
  return {rep, alpha};
}

// ---- batched forward pass ----

struct ForwardOptions {
  // Drop trailing steps that are padding for every statement in the batch.
  // Exact: padded steps neither move the carried state nor receive weight.
  bool trim_padding = true;
};

struct ForwardResult {
  Var probabilities;               // B × 1
  std::vector<Tensor> word_alpha;  // global: one B × T; hierarchical: one per channel
  std::optional<Tensor> channel_alpha;  // hierarchical: B × |channels|
  std::size_t steps = 0;
};

namespace detail {

inline std::vector<std::vector<std::uint8_t>> step_masks(std::span<const EncodedStatement* const> batch, std::size_t T) {
  std::vector<std::vector<std::uint8_t>> masks(T, std::vector<std::uint8_t>(batch.size()));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < batch.size(); ++b) masks[t][b] = batch[b]->mask[t];
  }
  return masks;
}

inline std::vector<std::int32_t> step_ids(std::span<const EncodedStatement* const> batch, Channel c, std::size_t t) {
  std::vector<std::int32_t> ids(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) ids[b] = batch[b]->ids(c)[t];
  return ids;
}

inline Var output_layer(Tape& tape, const ModelParams& p, Var rep) {
  using namespace ad;
  return sigmoid(add(matmul_bt(rep, tape.parameter(p.output_weight)), tape.parameter(p.output_bias)));
}

}  // namespace detail

// Concatenated channel embeddings per step, fixed order word ‖ pos ‖ liwc.
inline std::vector<Var> merge_channels(Tape& tape, const ModelParams& p, std::span<const EncodedStatement* const> batch,
                                       std::size_t T) {
  std::vector<Var> xs;
  xs.reserve(T);
  std::vector<Var> parts;
  for (std::size_t t = 0; t < T; ++t) {
    parts.clear();
    for (auto c : p.config.channels) {
      const EmbeddingMatrix& e = p.embedding(c);
      parts.push_back(ad::gather(tape.parameter(e.weights, e.trainable), detail::step_ids(batch, c, t)));
    }
    xs.push_back(parts.size() == 1 ? parts[0] : ad::concat(parts, 1));
  }
  return xs;
}

inline ForwardResult forward(Tape& tape, const ModelParams& p, std::span<const EncodedStatement* const> batch,
                             ForwardOptions options = {}) {
  if (batch.empty()) throw DegenerateInput("forward pass over an empty batch");
  std::size_t T = 0;
  for (const auto* e : batch) {
    if (e->mask.size() != p.config.max_len) throw ShapeError("encoded statement length does not match max_len");
    if (e->length == 0) throw DegenerateInput("statement has no tokens");
    T = std::max(T, e->length);
  }
  if (!options.trim_padding) T = p.config.max_len;
  const auto masks = detail::step_masks(batch, T);

  ForwardResult result;
  result.steps = T;
  switch (p.config.architecture) {
    case Architecture::Vanilla: {
      auto xs = merge_channels(tape, p, batch, T);
      auto hs = encode_sequence(xs, masks, bind(tape, p.encoders[0]));
      result.probabilities = detail::output_layer(tape, p, hs.back());
      break;
    }
    case Architecture::GlobalAttention: {
      auto xs = merge_channels(tape, p, batch, T);
      auto hs = encode_sequence(xs, masks, bind(tape, p.encoders[0]));
      auto att = global_attention(hs, masks, bind(tape, p.attentions[0]));
      result.word_alpha.push_back(att.alpha.value());
      result.probabilities = detail::output_layer(tape, p, att.representation);
      break;
    }
    case Architecture::HierarchicalAttention: {
      std::vector<Var> sentence_reps;
      for (std::size_t i = 0; i < p.config.channels.size(); ++i) {
        const Channel c = p.config.channels[i];
        const EmbeddingMatrix& e = p.embedding(c);
        Var table = tape.parameter(e.weights, e.trainable);
        std::vector<Var> xs;
        xs.reserve(T);
        for (std::size_t t = 0; t < T; ++t) xs.push_back(ad::gather(table, detail::step_ids(batch, c, t)));
        auto hs = encode_sequence(xs, masks, bind(tape, p.encoders[i]));
        auto att = global_attention(hs, masks, bind(tape, p.attentions[i]));
        result.word_alpha.push_back(att.alpha.value());
        sentence_reps.push_back(att.representation);
      }
      const std::vector<std::vector<std::uint8_t>> all_real(sentence_reps.size(),
                                                            std::vector<std::uint8_t>(batch.size(), 1));
      auto top = encode_sequence(sentence_reps, all_real, bind(tape, *p.top_encoder));
      auto joint = global_attention(top, all_real, bind(tape, *p.top_attention));
      result.channel_alpha = joint.alpha.value();
      result.probabilities = detail::output_layer(tape, p, joint.representation);
      break;
    }
  }
  return result;
}

inline constexpr double kDecisionThreshold = 0.5;

inline Label classify(double probability, double threshold = kDecisionThreshold) {
  return probability >= threshold ? Label::Biased : Label::Neutral;
}

// Probabilities for any number of statements, evaluated in fixed-size
// chunks so results do not depend on how callers group their input.
inline std::vector<double> predict(const ModelParams& p, std::span<const EncodedStatement> statements,
                                   std::size_t chunk = 100) {
  std::vector<double> out;
  out.reserve(statements.size());
  for (std::size_t begin = 0; begin < statements.size(); begin += chunk) {
    const std::size_t end = std::min(statements.size(), begin + chunk);
    std::vector<const EncodedStatement*> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(&statements[i]);
    Tape tape;
    auto r = forward(tape, p, batch);
    for (double v : r.probabilities.value().values()) out.push_back(v);
  }
  return out;
}

}  // namespace biaslang
