#pragma once

// The work behind each command-line subcommand. Argument parsing lives in
// tools/biaslang.cpp; everything here takes resolved options so the same
// runs can be driven from tests.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "biaslang/agreement.hpp"
#include "biaslang/corpus.hpp"
#include "biaslang/dump_reader.hpp"
#include "biaslang/jsonl.hpp"
#include "biaslang/lexicon.hpp"
#include "biaslang/manifest.hpp"
#include "biaslang/models.hpp"
#include "biaslang/revision_miner.hpp"
#include "biaslang/train_eval.hpp"

namespace biaslang::cli {

namespace detail {

inline nlohmann::json output_entry(const std::string& path) { return {{"path", path}, {"sha256", sha256_file(path)}}; }

// Unlabelled input for classify/attention: "text" is required, "id" and
// "pos" are optional. Missing ids become the line number.
struct RawStatement {
  std::string id;
  std::string text;
  std::vector<std::string> pos;
};

inline std::vector<RawStatement> read_raw(const std::string& path) {
  std::vector<RawStatement> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    RawStatement s;
    s.id = j.contains("id") ? id_string(j.at("id")) : std::to_string(line);
    s.text = j.at("text").get<std::string>();
    if (j.contains("pos")) s.pos = j.at("pos").get<std::vector<std::string>>();
    out.push_back(std::move(s));
  });
  return out;
}

inline std::vector<EncodedStatement> encode_raw(const Model& model, const std::vector<RawStatement>& raw) {
  std::vector<EncodedStatement> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.push_back(model.encoder.encode(raw[i].text, raw[i].pos));
    if (out.back().length == 0) throw FormatError("statement '" + raw[i].id + "' has no tokens", i + 1);
  }
  return out;
}

}  // namespace detail

// ---- mine ----

struct MineOptions {
  std::string dump;
  std::string out;
};

inline MiningSummary run_mine(const MineOptions& o) {
  DumpReader reader(o.dump);
  MiningSummary summary;
  {
    auto out = open_output(o.out);
    summary = mine_dump_to_jsonl(reader, out);
  }
  RunManifest m;
  m.command = "mine";
  m.config = {{"dump", o.dump}, {"out", o.out}};
  m.add_input(o.dump);
  m.outputs = {{"diffs", detail::output_entry(o.out)}, {"summary", summary.to_json()}};
  m.write(manifest_path_for(o.out));
  return summary;
}

// ---- prepare ----

struct PrepareOptions {
  std::string biased;
  std::string neutral_pool;
  Regime regime = Regime::Featured;
  std::uint64_t seed = 0;
  std::string out;  // directory
};

struct PrepareResult {
  std::size_t regime_size = 0;
  std::size_t train = 0, validation = 0, test = 0;
};

inline PrepareResult run_prepare(const PrepareOptions& o) {
  const auto biased = read_corpus(o.biased);
  const auto pool = read_corpus(o.neutral_pool);
  const auto data = regime_dataset(biased, pool, o.regime, o.seed);
  const auto parts = split(data, o.seed);

  std::filesystem::create_directories(o.out);
  const std::filesystem::path dir(o.out);
  const std::string regime_path = (dir / "regime.jsonl").string();
  const std::string train_path = (dir / "train.jsonl").string();
  const std::string val_path = (dir / "validation.jsonl").string();
  const std::string test_path = (dir / "test.jsonl").string();
  write_corpus(regime_path, data);
  write_corpus(train_path, parts.train);
  write_corpus(val_path, parts.validation);
  write_corpus(test_path, parts.test);

  RunManifest m;
  m.command = "prepare";
  m.seed = o.seed;
  m.config = {{"biased", o.biased}, {"neutral_pool", o.neutral_pool}, {"regime", to_string(o.regime)},
              {"seed", o.seed},     {"out", o.out}};
  m.add_input(o.biased);
  m.add_input(o.neutral_pool);
  m.outputs = {{"regime", detail::output_entry(regime_path)},
               {"train", detail::output_entry(train_path)},
               {"validation", detail::output_entry(val_path)},
               {"test", detail::output_entry(test_path)}};
  m.write((dir / "manifest.json").string());
  return {data.size(), parts.train.size(), parts.validation.size(), parts.test.size()};
}

// ---- train ----

struct TrainOptions {
  std::string train;
  std::string validation;  // optional
  std::string lexicon;
  std::string embeddings;  // required when model.pretrained_words
  ModelConfig model;
  TrainConfig training;
  std::string out;  // checkpoint path
  std::string log;  // defaults to <out>.log.jsonl
};

inline TrainResult run_train(const TrainOptions& o) {
  DatasetSplit data;
  data.train = read_corpus(o.train);
  if (!o.validation.empty()) data.validation = read_corpus(o.validation);
  const CategoryLexicon lexicon = CategoryLexicon::load(o.lexicon);
  TrainResult result = train(o.model, o.training, data, lexicon, o.model.pretrained_words ? o.embeddings : std::string());

  save_checkpoint(result.model, o.out);
  const std::string log_path = o.log.empty() ? o.out + ".log.jsonl" : o.log;
  {
    auto log = open_output(log_path);
    write_epoch_log(log, result.log);
  }

  RunManifest m;
  m.command = "train";
  m.seed = o.training.seed;
  m.config = {{"train", o.train}, {"validation", o.validation}, {"lexicon", o.lexicon},
              {"embeddings", o.embeddings}, {"model", o.model.to_json()}, {"training", o.training.to_json()},
              {"out", o.out}, {"log", log_path}};
  m.add_input(o.train);
  if (!o.validation.empty()) m.add_input(o.validation);
  m.add_input(o.lexicon);
  if (o.model.pretrained_words) m.add_input(o.embeddings);
  m.outputs = {{"checkpoint", detail::output_entry(o.out)},
               {"log", detail::output_entry(log_path)},
               {"best_epoch", result.best_epoch}};
  m.write(manifest_path_for(o.out));
  return result;
}

// ---- evaluate ----

struct EvaluateOptions {
  std::string model;
  std::string data;
  std::string out;  // metrics JSON; empty -> caller prints
};

inline Metrics run_evaluate(const EvaluateOptions& o) {
  const Model model = load_checkpoint(o.model);
  const auto data = read_corpus(o.data);
  const Metrics metrics = evaluate(model, data);
  if (!o.out.empty()) {
    {
      auto out = open_output(o.out);
      out << metrics.to_json().dump(2) << '\n';
    }
    RunManifest m;
    m.command = "evaluate";
    m.config = {{"model", o.model}, {"data", o.data}, {"out", o.out}};
    m.add_input(o.model);
    m.add_input(o.data);
    m.outputs = {{"metrics", detail::output_entry(o.out)}};
    m.write(manifest_path_for(o.out));
  }
  return metrics;
}

// ---- classify ----

struct ClassifyOptions {
  std::string model;
  std::string input;
  std::string out;
  double threshold = kDecisionThreshold;
};

inline std::size_t run_classify(const ClassifyOptions& o) {
  const Model model = load_checkpoint(o.model);
  const auto raw = detail::read_raw(o.input);
  const auto probs = predict(model.params, detail::encode_raw(model, raw));
  {
    auto out = open_output(o.out);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      nlohmann::json j = {{"id", raw[i].id}, {"label", to_string(classify(probs[i], o.threshold))},
                          {"probability", probs[i]}};
      out << j.dump() << '\n';
    }
  }
  RunManifest m;
  m.command = "classify";
  m.config = {{"model", o.model}, {"input", o.input}, {"out", o.out}, {"threshold", o.threshold}};
  m.add_input(o.model);
  m.add_input(o.input);
  m.outputs = {{"predictions", detail::output_entry(o.out)}};
  m.write(manifest_path_for(o.out));
  return raw.size();
}

// ---- attention ----

struct AttentionOptions {
  std::string model;
  std::string input;
  std::string out;
};

// One JSON object per statement with the tokens the model saw and their
// attention weights. Hierarchical models report one weight row per channel
// plus the channel-level weights.
inline std::size_t run_attention(const AttentionOptions& o) {
  const Model model = load_checkpoint(o.model);
  const auto& config = model.params.config;
  if (config.architecture == Architecture::Vanilla) throw ConfigError("attention needs an attention model checkpoint");
  const auto raw = detail::read_raw(o.input);
  const auto encoded = detail::encode_raw(model, raw);
  auto out = open_output(o.out);
  constexpr std::size_t kChunk = 100;
  for (std::size_t begin = 0; begin < encoded.size(); begin += kChunk) {
    const std::size_t end = std::min(encoded.size(), begin + kChunk);
    std::vector<const EncodedStatement*> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(&encoded[i]);
    Tape tape;
    const auto r = forward(tape, model.params, batch);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto& item = raw[begin + b];
      const std::size_t len = batch[b]->length;
      auto weights = [&](const Tensor& alpha) {
        auto row = alpha.row(b);
        return std::vector<double>(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(len));
      };
      nlohmann::json j = {{"id", item.id},
                          {"tokens", model.encoder.model_tokens(item.text)},
                          {"probability", r.probabilities.value()[b]}};
      if (config.architecture == Architecture::GlobalAttention) {
        j["alpha"] = weights(r.word_alpha[0]);
      } else {
        nlohmann::json word = nlohmann::json::object();
        nlohmann::json channel = nlohmann::json::object();
        for (std::size_t c = 0; c < config.channels.size(); ++c) {
          word[to_string(config.channels[c])] = weights(r.word_alpha[c]);
          channel[to_string(config.channels[c])] = r.channel_alpha->at(b, c);
        }
        j["word_alpha"] = word;
        j["channel_alpha"] = channel;
      }
      out << j.dump() << '\n';
    }
  }
  out.close();
  RunManifest m;
  m.command = "attention";
  m.config = {{"model", o.model}, {"input", o.input}, {"out", o.out}};
  m.add_input(o.model);
  m.add_input(o.input);
  m.outputs = {{"attention", detail::output_entry(o.out)}};
  m.write(manifest_path_for(o.out));
  return raw.size();
}

// ---- agreement ----

struct AgreementOptions {
  std::string judgments;
  std::string out;  // empty -> caller prints
};

inline nlohmann::json run_agreement(const AgreementOptions& o) {
  const JudgmentTable table = read_judgments(o.judgments);
  nlohmann::json result = {{"alpha", krippendorff_alpha(table)},
                           {"items", table.items.size()},
                           {"workers", table.workers.size()},
                           {"ratings", table.ratings.size()}};
  if (!o.out.empty()) {
    {
      auto out = open_output(o.out);
      out << result.dump(2) << '\n';
    }
    RunManifest m;
    m.command = "agreement";
    m.config = {{"judgments", o.judgments}, {"out", o.out}};
    m.add_input(o.judgments);
    m.outputs = {{"agreement", detail::output_entry(o.out)}};
    m.write(manifest_path_for(o.out));
  }
  return result;
}

}  // namespace biaslang::cli
