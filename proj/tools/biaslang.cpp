#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "biaslang/cli.hpp"

namespace {

using namespace biaslang;

std::string optional_number(const std::optional<double>& v) { return v ? std::to_string(*v) : "undefined"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect biased language in Wikipedia-style statements."};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "TOML or INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  // mine
  cli::MineOptions mine;
  auto* mine_cmd = app.add_subcommand("mine", "Extract POV-tagged single-statement edits from a revision dump");
  mine_cmd->add_option("--dump", mine.dump, "MediaWiki XML revision dump")->required()->check(CLI::ExistingFile);
  mine_cmd->add_option("--out", mine.out, "Output JSONL of statement diffs")->required();

  // prepare
  cli::PrepareOptions prepare;
  std::string regime = "featured";
  auto* prepare_cmd = app.add_subcommand("prepare", "Build a dataset regime and its 70/10/20 split");
  prepare_cmd->add_option("--biased", prepare.biased, "Biased statements (corpus JSONL)")->required()->check(CLI::ExistingFile);
  prepare_cmd->add_option("--neutral-pool", prepare.neutral_pool, "Neutral candidate statements (corpus JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  prepare_cmd->add_option("--regime", regime, "cw-hard, featured or type-balanced")
      ->check(CLI::IsMember({"cw-hard", "featured", "type-balanced"}))
      ->capture_default_str();
  prepare_cmd->add_option("--seed", prepare.seed, "Sampling and split seed")->capture_default_str();
  prepare_cmd->add_option("--out", prepare.out, "Output directory")->required();

  // train
  cli::TrainOptions train;
  std::string architecture = "global";
  std::string channels = "wl";
  std::string sharing = "separate";
  std::uint64_t seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier and write a checkpoint");
  train_cmd->add_option("--train", train.train, "Training statements (corpus JSONL)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--validation", train.validation, "Validation statements used for epoch selection")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--lexicon", train.lexicon, "Category lexicon TSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--embeddings", train.embeddings, "Pretrained word vectors (GloVe text format)")
      ->check(CLI::ExistingFile);
  train_cmd->add_flag("--pretrained-words", train.model.pretrained_words, "Use --embeddings for the word table");
  train_cmd->add_option("--architecture", architecture, "vanilla, global or hierarchical")
      ->check(CLI::IsMember({"vanilla", "global", "hierarchical"}))
      ->capture_default_str();
  train_cmd->add_option("--channels", channels, "w, wp, wl or wpl")->capture_default_str();
  train_cmd->add_option("--sharing", sharing, "Embedding sharing: separate, pos-liwc or all")
      ->check(CLI::IsMember({"separate", "pos-liwc", "all"}))
      ->capture_default_str();
  train_cmd->add_option("--embed-dim", train.model.embed_dim, "Embedding size")->capture_default_str();
  train_cmd->add_option("--hidden-dim", train.model.hidden_dim, "GRU state size")->capture_default_str();
  train_cmd->add_option("--attn-dim", train.model.attn_dim, "Attention projection size")->capture_default_str();
  train_cmd->add_option("--max-len", train.model.max_len, "Tokens kept per statement")->capture_default_str();
  train_cmd->add_option("--epochs", train.training.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--batch-size", train.training.batch_size, "Statements per Adam step")->capture_default_str();
  train_cmd->add_option("--lr", train.training.optimizer.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_flag("!--no-shuffle", train.training.shuffle_each_epoch, "Keep the input order every epoch");
  train_cmd->add_option("--seed", seed, "Seed for initialisation and batch order")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
  train_cmd->add_option("--log", train.log, "Per-epoch JSONL log (default <out>.log.jsonl)");

  // evaluate
  cli::EvaluateOptions evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on labelled statements");
  evaluate_cmd->add_option("--model", evaluate.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--data", evaluate.data, "Labelled statements (corpus JSONL)")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", evaluate.out, "Metrics JSON (default: standard output)");

  // classify
  cli::ClassifyOptions classify;
  auto* classify_cmd = app.add_subcommand("classify", "Label statements as biased or neutral");
  classify_cmd->add_option("--model", classify.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--input", classify.input, "JSONL with a \"text\" field per line")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--out", classify.out, "Output JSONL")->required();
  classify_cmd->add_option("--threshold", classify.threshold, "Probability at or above which a statement is biased")
      ->capture_default_str();

  // attention
  cli::AttentionOptions attention;
  auto* attention_cmd = app.add_subcommand("attention", "Dump per-token attention weights");
  attention_cmd->add_option("--model", attention.model, "Attention model checkpoint")->required()->check(CLI::ExistingFile);
  attention_cmd->add_option("--input", attention.input, "JSONL with a \"text\" field per line")->required()->check(CLI::ExistingFile);
  attention_cmd->add_option("--out", attention.out, "Output JSONL")->required();

  // agreement
  cli::AgreementOptions agreement;
  auto* agreement_cmd = app.add_subcommand("agreement", "Krippendorff's alpha over crowd judgments");
  agreement_cmd->add_option("--judgments", agreement.judgments, "Judgment JSONL (worker_id, item_id, rating)")
      ->required()
      ->check(CLI::ExistingFile);
  agreement_cmd->add_option("--out", agreement.out, "Result JSON (default: standard output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mine_cmd) {
      auto summary = cli::run_mine(mine);
      std::cout << summary.to_json().dump(2) << '\n';
    } else if (*prepare_cmd) {
      prepare.regime = parse_regime(regime);
      auto r = cli::run_prepare(prepare);
      std::cerr << "regime " << regime << ": " << r.regime_size << " statements (train " << r.train << ", validation "
                << r.validation << ", test " << r.test << ")\n";
    } else if (*train_cmd) {
      train.model.architecture = parse_architecture(architecture);
      train.model.channels = parse_channels(channels);
      train.model.weight_sharing = parse_weight_sharing(sharing);
      train.model.seed = seed;
      train.training.seed = seed;
      auto result = cli::run_train(train);
      for (const auto& e : result.log) std::cerr << e.to_json().dump() << '\n';
      std::cerr << "best epoch " << result.best_epoch << ", checkpoint " << train.out << '\n';
    } else if (*evaluate_cmd) {
      auto metrics = cli::run_evaluate(evaluate);
      if (evaluate.out.empty()) {
        std::cout << metrics.to_json().dump(2) << '\n';
      } else {
        std::cerr << "accuracy " << metrics.accuracy << ", f1 " << optional_number(metrics.f1) << '\n';
      }
    } else if (*classify_cmd) {
      cli::run_classify(classify);
    } else if (*attention_cmd) {
      cli::run_attention(attention);
    } else if (*agreement_cmd) {
      auto result = cli::run_agreement(agreement);
      if (agreement.out.empty()) std::cout << result.dump(2) << '\n';
    }
  } catch (const biaslang::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
