#pragma once

// Mini-batch training with Adam on binary cross-entropy, best-epoch model
// selection on validation accuracy, metrics, and model checkpoints.

#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "biaslang/corpus.hpp"
#include "biaslang/encoder.hpp"
#include "biaslang/error.hpp"
#include "biaslang/lexicon.hpp"
#include "biaslang/models.hpp"
#include "biaslang/numerics/adam.hpp"
#include "biaslang/numerics/container.hpp"
#include "biaslang/random.hpp"

namespace biaslang {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 100;
  ad::AdamConfig optimizer{};
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;

  void validate() const {
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
  }

  nlohmann::json to_json() const {
    return {{"epochs", epochs},
            {"batch_size", batch_size},
            {"learning_rate", optimizer.lr},
            {"beta1", optimizer.beta1},
            {"beta2", optimizer.beta2},
            {"epsilon", optimizer.epsilon},
            {"seed", seed},
            {"shuffle_each_epoch", shuffle_each_epoch}};
  }
};

// A trained classifier: parameters plus the encoder that produced its
// vocabularies.
struct Model {
  ModelParams params;
  StatementEncoder encoder;

  std::vector<EncodedStatement> encode(std::span<const LabeledStatement> statements) const {
    std::vector<EncodedStatement> out;
    out.reserve(statements.size());
    for (const auto& s : statements) out.push_back(encoder.encode(s));
    return out;
  }

  std::vector<double> probabilities(std::span<const LabeledStatement> statements) const {
    return predict(params, encode(statements));
  }
};

// ---- metrics ----

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  Confusion confusion;

  static Metrics from_confusion(const Confusion& c) {
    if (c.total() == 0) throw DegenerateInput("metrics over zero predictions");
    Metrics m;
    m.confusion = c;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (m.precision && m.recall) {
      const double s = *m.precision + *m.recall;
      m.f1 = s == 0.0 ? 0.0 : 2.0 * *m.precision * *m.recall / s;
    }
    return m;
  }

  nlohmann::json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"accuracy", accuracy},
            {"precision", opt(precision)},
            {"recall", opt(recall)},
            {"f1", opt(f1)},
            {"confusion", {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn}, {"fn", confusion.fn}}}};
  }
};

// Biased is the positive class.
inline Metrics score(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size()) throw ShapeError("prediction and gold label counts differ");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::Biased;
    const bool g = gold[i] == Label::Biased;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return Metrics::from_confusion(c);
}

inline Metrics evaluate(const Model& model, std::span<const LabeledStatement> statements) {
  if (statements.empty()) throw DegenerateInput("evaluation set is empty");
  auto probs = model.probabilities(statements);
  std::vector<Label> predicted, gold;
  predicted.reserve(probs.size());
  gold.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    predicted.push_back(classify(probs[i]));
    gold.push_back(statements[i].label);
  }
  return score(predicted, gold);
}

// ---- training ----

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> val_accuracy;

  nlohmann::json to_json() const {
    return {{"epoch", epoch},
            {"train_loss", train_loss},
            {"val_accuracy", val_accuracy ? nlohmann::json(*val_accuracy) : nlohmann::json(nullptr)}};
  }
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

inline void write_epoch_log(std::ostream& out, std::span<const EpochLog> log) {
  for (const auto& e : log) out << e.to_json().dump() << '\n';
}

namespace detail {

inline double target(Label l) { return l == Label::Biased ? 1.0 : 0.0; }

}  // namespace detail

// Vocabularies come from split.train alone. Each epoch takes
// ceil(n / batch_size) Adam steps (the last batch may be short); the
// returned parameters are those of the epoch with the best validation
// accuracy, later epochs winning ties. Without a validation set the last
// epoch is kept.
inline TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config, const DatasetSplit& split,
                         const CategoryLexicon& lexicon, const std::string& embeddings_path = {}) {
  model_config.validate();
  train_config.validate();
  if (split.train.empty()) throw DegenerateInput("training set is empty");

  StatementEncoder encoder(lexicon, model_config.max_len, model_config.weight_sharing);
  encoder.fit(split.train);
  Model model{init_params(model_config, encoder, embeddings_path), std::move(encoder)};

  std::vector<EncodedStatement> encoded = model.encode(split.train);
  std::vector<double> targets;
  targets.reserve(split.train.size());
  for (const auto& s : split.train) targets.push_back(detail::target(s.label));

  std::vector<Tensor*> params = model.params.trainable();
  ad::Adam adam(train_config.optimizer);
  Rng rng(train_config.seed);
  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{model, {}, 0};
  std::optional<double> best_accuracy;
  const std::size_t n = encoded.size();
  const std::size_t B = train_config.batch_size;

  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    if (train_config.shuffle_each_epoch) rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t begin = 0, batch = 0; begin < n; begin += B, ++batch) {
      const std::size_t end = std::min(n, begin + B);
      std::vector<const EncodedStatement*> items;
      std::vector<double> y;
      for (std::size_t i = begin; i < end; ++i) {
        items.push_back(&encoded[order[i]]);
        y.push_back(targets[order[i]]);
      }
      try {
        Tape tape;
        auto fwd = forward(tape, model.params, items);
        Var loss = ad::bce_loss(fwd.probabilities, y);
        tape.backward(loss);
        std::vector<const Tensor*> grads;
        grads.reserve(params.size());
        for (auto* p : params) grads.push_back(tape.gradient(*p));
        adam.step(params, grads);
        loss_sum += loss.value()[0] * static_cast<double>(end - begin);
      } catch (const NumericFault& e) {
        throw NumericFault("epoch " + std::to_string(epoch) + " batch " + std::to_string(batch) + ": " + e.what());
      }
    }

    EpochLog entry{epoch, loss_sum / static_cast<double>(n), std::nullopt};
    if (!split.validation.empty()) entry.val_accuracy = evaluate(model, split.validation).accuracy;
    result.log.push_back(entry);

    const bool better = !split.validation.empty() ? (!best_accuracy || *entry.val_accuracy >= *best_accuracy) : true;
    if (better) {
      best_accuracy = entry.val_accuracy;
      result.best_epoch = epoch;
      result.model.params = model.params;
    }
  }
  return result;
}

// ---- checkpoints ----

inline constexpr const char* kCheckpointKind = "biaslang-model";

inline std::string encode_checkpoint(const Model& model) {
  nlohmann::json frozen = nlohmann::json::array();
  for (const auto& e : model.params.embeddings) {
    if (!e.trainable) frozen.push_back("embedding." + e.name);
  }
  nlohmann::json meta = {{"kind", kCheckpointKind},
                         {"model_config", model.params.config.to_json()},
                         {"encoder", model.encoder.to_json()},
                         {"frozen", frozen}};
  return ad::encode_container(meta, model.params.named());
}

inline Model decode_checkpoint(const std::string& bytes) {
  ad::Container c = ad::decode_container(bytes);
  if (c.meta.value("kind", std::string()) != kCheckpointKind) throw FormatError("not a model checkpoint", 0);
  ModelConfig config;
  try {
    config = ModelConfig::from_json(c.meta.at("model_config"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint model config: ") + e.what(), 0);
  }
  StatementEncoder encoder = StatementEncoder::from_json(c.meta.at("encoder"));

  ModelConfig skeleton = config;
  skeleton.pretrained_words = false;
  ModelParams params = init_params(skeleton, encoder);
  params.config = config;
  const auto frozen = c.meta.at("frozen").get<std::vector<std::string>>();
  for (auto& e : params.embeddings) {
    e.trainable = std::find(frozen.begin(), frozen.end(), "embedding." + e.name) == frozen.end();
  }
  params.for_each([&](const std::string& name, Tensor& t, bool) {
    const Tensor& stored = c.at(name);
    if (stored.shape() != t.shape()) {
      throw FormatError("checkpoint tensor " + name + " has shape " + ad::shape_string(stored.shape()) + ", expected " +
                            ad::shape_string(t.shape()),
                        0);
    }
    t = stored;
  });
  if (c.tensors.size() != params.named().size()) throw FormatError("checkpoint has unexpected extra tensors", 0);
  return Model{std::move(params), std::move(encoder)};
}

inline void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path);
  const std::string bytes = encode_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint " + path);
}

inline Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace biaslang
