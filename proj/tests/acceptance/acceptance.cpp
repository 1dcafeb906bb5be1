// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit if
// any criterion fails. Run a subset with e.g. `biaslang_acceptance 2 7`.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biaslang/agreement.hpp"
#include "biaslang/cli.hpp"
#include "biaslang/corpus.hpp"
#include "biaslang/models.hpp"
#include "biaslang/revision_miner.hpp"
#include "biaslang/train_eval.hpp"

#include "../support/fixtures.hpp"
#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"

namespace fs = std::filesystem;
using namespace biaslang;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::Fail, std::move(d)}; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path data_dir() { return fs::path(BIASLANG_SOURCE_DIR) / "data"; }

// 1. Analytic gradients against central differences for every parameter
//    tensor of each architecture at toy size.
Outcome gradient_correctness() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t tensors = 0;
  for (auto arch : {Architecture::Vanilla, Architecture::GlobalAttention, Architecture::HierarchicalAttention}) {
    support::ToyOptions o;
    o.architecture = arch;
    Model model = support::toy_model(o);
    if (model.params.embedding(Channel::Word).weights.rows() != 50) return fail("toy word vocabulary is not 50");
    Rng rng(7);
    std::vector<EncodedStatement> batch;
    std::vector<double> targets;
    for (int i = 0; i < 4; ++i) {
      batch.push_back(support::random_encoded(rng, model.params));
      targets.push_back(i % 2 ? 1.0 : 0.0);
    }
    std::vector<const EncodedStatement*> ptrs;
    for (const auto& e : batch) ptrs.push_back(&e);
    std::vector<std::pair<std::string, Tensor*>> params;
    model.params.for_each([&](const std::string& n, Tensor& t, bool trainable) {
      if (trainable) params.emplace_back(n, &t);
    });
    auto results = support::gradcheck(params, [&](Tape& tape) {
      return ad::bce_loss(forward(tape, model.params, ptrs).probabilities, targets);
    });
    for (const auto& r : results) {
      ++tensors;
      if (r.relative_error > worst) {
        worst = r.relative_error;
        worst_name = to_string(arch) + "/" + r.name;
      }
    }
  }
  const double elapsed = seconds_since(start);
  std::string d = std::to_string(tensors) + " tensors, worst relative error " + num(worst) + " (" + worst_name +
                  "), " + num(elapsed) + " s";
  return worst <= 1e-4 && elapsed < 30.0 ? pass(d) : fail(d);
}

// 2. Attention weights at both levels over 1000 random inputs.
Outcome attention_normalization() {
  std::size_t vectors = 0;
  double worst_sum = 0.0;
  bool negative = false, leaked = false;
  Rng rng(11);
  for (auto arch : {Architecture::GlobalAttention, Architecture::HierarchicalAttention}) {
    support::ToyOptions o;
    o.architecture = arch;
    o.seed = 3;
    Model model = support::toy_model(o);
    for (int round = 0; round < 50; ++round) {
      std::vector<EncodedStatement> batch;
      for (int i = 0; i < 10; ++i) batch.push_back(support::random_encoded(rng, model.params));
      std::vector<const EncodedStatement*> ptrs;
      for (const auto& e : batch) ptrs.push_back(&e);
      Tape tape;
      ForwardOptions fo;
      fo.trim_padding = round % 2 == 0;
      auto r = forward(tape, model.params, ptrs, fo);
      auto check = [&](const Tensor& alpha, const std::vector<std::vector<std::uint8_t>>* masks) {
        for (std::size_t b = 0; b < alpha.rows(); ++b) {
          double s = 0.0;
          for (std::size_t t = 0; t < alpha.cols(); ++t) {
            const double a = alpha.at(b, t);
            s += a;
            negative = negative || a < 0.0;
            if (masks && !(*masks)[b][t] && a != 0.0) leaked = true;
          }
          worst_sum = std::max(worst_sum, std::abs(s - 1.0));
          ++vectors;
        }
      };
      std::vector<std::vector<std::uint8_t>> masks(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b) masks[b].assign(batch[b].mask.begin(), batch[b].mask.begin() + static_cast<std::ptrdiff_t>(r.steps));
      for (const auto& alpha : r.word_alpha) check(alpha, &masks);
      if (r.channel_alpha) check(*r.channel_alpha, nullptr);
    }
  }
  std::string d = std::to_string(vectors) + " alpha vectors, max |sum-1| " + num(worst_sum) +
                  (negative ? ", negative weight found" : "") + (leaked ? ", weight on masked position" : "");
  return worst_sum <= 1e-9 && !negative && !leaked && vectors >= 1000 ? pass(d) : fail(d);
}

// 3. Extra padding never moves the output probability.
Outcome padding_invariance() {
  double worst = 0.0;
  std::size_t checked = 0;
  Rng rng(13);
  for (auto arch : {Architecture::Vanilla, Architecture::GlobalAttention, Architecture::HierarchicalAttention}) {
    support::ToyOptions o;
    o.architecture = arch;
    o.max_len = 12;
    Model model = support::toy_model(o);
    for (int i = 0; i < 100; ++i) {
      // Real tokens fit in half of max_len, so up to max_len/2 pads follow.
      EncodedStatement e = support::random_encoded(rng, model.params);
      if (e.length > 6) {
        for (std::size_t t = 6; t < e.length; ++t) {
          e.word_ids[t] = e.pos_ids[t] = e.liwc_ids[t] = 0;
          e.mask[t] = 0;
        }
        e.length = 6;
      }
      std::vector<const EncodedStatement*> alone{&e};
      Tape t1, t2;
      const double trimmed = forward(t1, model.params, alone).probabilities.value()[0];
      ForwardOptions full;
      full.trim_padding = false;
      const double padded = forward(t2, model.params, alone, full).probabilities.value()[0];
      worst = std::max(worst, std::abs(trimmed - padded));
      ++checked;
    }
  }
  std::string d = std::to_string(checked) + " statements, max |Δp| " + num(worst);
  return worst < 1e-12 ? pass(d) : fail(d);
}

// 4. Batched GRU step against a scalar evaluation of the four equations.
Outcome gru_oracle() {
  Rng rng(17);
  auto rand_mat = [&](std::size_t r, std::size_t c) {
    oracle::Mat m(r, oracle::Vec(c));
    for (auto& row : m)
      for (auto& v : row) v = rng.uniform(-1.0, 1.0);
    return m;
  };
  auto rand_vec = [&](std::size_t n) {
    oracle::Vec v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
  };
  auto to_tensor = [](const oracle::Mat& m) {
    std::vector<double> flat;
    for (const auto& r : m) flat.insert(flat.end(), r.begin(), r.end());
    return Tensor({m.size(), m[0].size()}, flat);
  };
  auto to_vec_tensor = [](const oracle::Vec& v) { return Tensor({v.size()}, v); };

  oracle::Gru o{rand_mat(3, 3), rand_mat(3, 3), rand_mat(3, 3), rand_mat(3, 3), rand_mat(3, 3),
                rand_mat(3, 3), rand_vec(3),    rand_vec(3),    rand_vec(3)};
  GruParams p{to_tensor(o.Wz), to_tensor(o.Wr), to_tensor(o.Wh), to_tensor(o.Uz),    to_tensor(o.Ur),
              to_tensor(o.Uh), to_vec_tensor(o.bz), to_vec_tensor(o.br), to_vec_tensor(o.bh)};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    oracle::Vec x = rand_vec(3), h = rand_vec(3);
    Tensor got = gru_step(to_vec_tensor(x), to_vec_tensor(h), p);
    oracle::Vec want = oracle::gru_step(x, h, o);
    for (std::size_t k = 0; k < 3; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
  }
  std::string d = "100 inputs, max abs error " + num(worst);
  return worst <= 1e-12 ? pass(d) : fail(d);
}

// 5. Moved / Updated / Deleted decision table.
Outcome diff_truth_table() {
  auto st = [](const std::string& text, const std::string& section = "") { return make_statement(text, section); };
  // Jaccard against the old statement (10 distinct tokens):
  const Statement old = st("the senator gave a brilliant speech about taxes in town", "Career");
  struct Case {
    const char* name;
    std::vector<Statement> added;
    std::vector<Statement> retained;
    EditType expected;
  };
  std::vector<Case> cases = {
      {"moved: identical text, other section", {st(old.text, "Views")}, {}, EditType::Moved},
      {"moved beats updated", {st("the senator gave a speech about taxes in town", "Career"), st(old.text, "Views")}, {}, EditType::Moved},
      {"moved via retained statement", {}, {st(old.text, "Legacy")}, EditType::Moved},
      {"same text same section is not moved", {st(old.text, "Career")}, {}, EditType::Updated},
      {"updated: jaccard 0.9", {st("the senator gave a speech about taxes in town")}, {}, EditType::Updated},
      // 7 shared / 10 union = 0.7 exactly
      {"updated: jaccard exactly 0.7", {st("the senator gave a brilliant speech about")}, {}, EditType::Updated},
      // 7 shared / 11 union ≈ 0.636
      {"deleted: jaccard 0.636", {st("the senator gave a brilliant speech about cats")}, {}, EditType::Deleted},
      // 8 shared / 11 union ≈ 0.727
      {"updated: jaccard 0.727", {st("the senator gave a brilliant speech about taxes city")}, {}, EditType::Updated},
      // 6 shared / 10 union = 0.6
      {"deleted: jaccard 0.6", {st("the senator gave a brilliant speech")}, {}, EditType::Deleted},
      {"deleted: nothing added", {}, {}, EditType::Deleted},
      {"updated: best of several added", {st("completely unrelated words here"), st("the senator gave a fine speech about taxes in town")}, {}, EditType::Updated},
      {"deleted: retained similar text is ignored for update", {}, {st("the senator gave a speech about taxes in town")}, EditType::Deleted},
  };
  std::size_t ok = 0;
  std::string failures;
  for (const auto& c : cases) {
    if (classify_edit(old, c.added, c.retained) == c.expected) {
      ++ok;
    } else {
      failures += std::string(" [") + c.name + "]";
    }
  }
  std::string d = std::to_string(ok) + "/" + std::to_string(cases.size()) + " cases" + failures;
  return ok == cases.size() && cases.size() == 12 ? pass(d) : fail(d);
}

// 6. Krippendorff's alpha: perfect agreement and a hand-worked fixture.
Outcome krippendorff() {
  JudgmentTable perfect;
  for (const char* w : {"w1", "w2", "w3"}) {
    perfect.add(w, "a", Rating::Biased);
    perfect.add(w, "b", Rating::Neutral);
    perfect.add(w, "c", Rating::Neutral);
  }
  const double a_perfect = krippendorff_alpha(perfect);
  const JudgmentTable fixture = read_judgments((data_dir() / "fixtures" / "judgments.jsonl").string());
  // Coincidence totals over the pairable values: n_biased = 11,
  // n_neutral = 10, n_dont_know = 2, n = 23; worked by hand to 13/57.
  const double expected = 13.0 / 57.0;
  const double got = krippendorff_alpha(fixture);
  std::string d = "perfect " + num(a_perfect) + ", 4x6 fixture " + num(got) + " vs " + num(expected);
  return a_perfect == 1.0 && std::abs(got - expected) <= 1e-9 && fixture.workers.size() == 4 && fixture.items.size() == 6
             ? pass(d)
             : fail(d);
}

// 7. Synthetic separable corpus, RNN_a^{wl}, default training settings.
Outcome synthetic_separability() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = support::synthetic_corpus(2000, 2018);
  const DatasetSplit parts = split(corpus, 2018);
  const CategoryLexicon lexicon = CategoryLexicon::load((data_dir() / "lexicon" / "demo_lexicon.tsv").string());
  ModelConfig mc;
  mc.architecture = Architecture::GlobalAttention;
  mc.channels = {Channel::Word, Channel::Liwc};
  mc.seed = 2018;
  TrainConfig tc;
  tc.seed = 2018;
  auto result = train(mc, tc, parts, lexicon);
  const Metrics m = evaluate(result.model, parts.test);
  const double elapsed = seconds_since(start);
  std::string d = "test F1 " + (m.f1 ? num(*m.f1) : std::string("undefined")) + ", accuracy " + num(m.accuracy) +
                  ", best epoch " + std::to_string(result.best_epoch) + ", " + num(elapsed) + " s";
  return m.f1 && *m.f1 >= 0.95 && elapsed < 120.0 ? pass(d) : fail(d);
}

// 8. Real corpus (optional): featured regime, RNN_a^{wl}, F1 >= 0.70.
//    BIASLANG_CORPUS_DIR must hold biased.jsonl and featured_pool.jsonl;
//    BIASLANG_GLOVE optionally points at 100-d word vectors.
Outcome real_corpus() {
  const char* dir = std::getenv("BIASLANG_CORPUS_DIR");
  if (!dir || !fs::exists(fs::path(dir) / "biased.jsonl") || !fs::exists(fs::path(dir) / "featured_pool.jsonl")) {
    return {Status::Skip, "released corpus not available (set BIASLANG_CORPUS_DIR)"};
  }
  const auto biased = read_corpus((fs::path(dir) / "biased.jsonl").string());
  const auto pool = read_corpus((fs::path(dir) / "featured_pool.jsonl").string());
  const auto data = regime_dataset(biased, pool, Regime::Featured, 1);
  const DatasetSplit parts = split(data, 1);
  const char* lex_env = std::getenv("BIASLANG_LEXICON");
  const CategoryLexicon lexicon =
      CategoryLexicon::load(lex_env ? lex_env : (data_dir() / "lexicon" / "demo_lexicon.tsv").string());
  ModelConfig mc;
  mc.architecture = Architecture::GlobalAttention;
  mc.channels = {Channel::Word, Channel::Liwc};
  std::string glove;
  if (const char* g = std::getenv("BIASLANG_GLOVE")) {
    glove = g;
    mc.pretrained_words = true;
  }
  auto result = train(mc, TrainConfig{}, parts, lexicon, glove);
  const Metrics m = evaluate(result.model, parts.test);
  std::string d = "featured regime test F1 " + (m.f1 ? num(*m.f1) : std::string("undefined"));
  return m.f1 && *m.f1 >= 0.70 ? pass(d) : fail(d);
}

// 9. The fixture pipeline twice with one seed: identical bytes.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "biaslang_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> metrics, checkpoints, diffs;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    fs::create_directories(dir);
    cli::run_mine({(data_dir() / "fixtures" / "mini_dump.xml").string(), (dir / "diffs.jsonl").string()});
    cli::PrepareOptions prep;
    prep.biased = (data_dir() / "fixtures" / "biased.jsonl").string();
    prep.neutral_pool = (data_dir() / "fixtures" / "featured_pool.jsonl").string();
    prep.regime = Regime::TypeBalanced;
    prep.seed = 5;
    prep.out = (dir / "data").string();
    cli::run_prepare(prep);
    cli::TrainOptions tr;
    tr.train = (dir / "data" / "train.jsonl").string();
    tr.validation = (dir / "data" / "validation.jsonl").string();
    tr.lexicon = (data_dir() / "lexicon" / "demo_lexicon.tsv").string();
    tr.model.architecture = Architecture::GlobalAttention;
    tr.model.channels = {Channel::Word, Channel::Liwc};
    tr.model.seed = 5;
    tr.training.seed = 5;
    tr.out = (dir / "model.blc").string();
    cli::run_train(tr);
    cli::run_evaluate({tr.out, (dir / "data" / "test.jsonl").string(), (dir / "metrics.json").string()});
    metrics.push_back(read_bytes(dir / "metrics.json"));
    checkpoints.push_back(read_bytes(dir / "model.blc"));
    diffs.push_back(read_bytes(dir / "diffs.jsonl"));
  }
  fs::remove_all(root);
  const bool same = metrics[0] == metrics[1] && checkpoints[0] == checkpoints[1] && diffs[0] == diffs[1];
  std::string d = "metrics " + std::to_string(metrics[0].size()) + " B, checkpoint " +
                  std::to_string(checkpoints[0].size()) + " B, " + (same ? "identical" : "DIFFERENT");
  return same && !metrics[0].empty() && !checkpoints[0].empty() ? pass(d) : fail(d);
}

// 10. save -> load -> evaluate equals the pre-save evaluation bit for bit.
Outcome checkpoint_round_trip() {
  const auto statements = support::toy_corpus(40, 4242);
  const std::array<Architecture, 3> archs = {Architecture::Vanilla, Architecture::GlobalAttention,
                                             Architecture::HierarchicalAttention};
  const std::array<WeightSharing, 3> sharing = {WeightSharing::Separate, WeightSharing::SharePosLiwc,
                                                WeightSharing::ShareAll};
  std::size_t identical = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    support::ToyOptions o;
    o.architecture = archs[i % 3];
    o.sharing = sharing[(i / 3) % 3];
    o.seed = 100 + i;
    o.dim = 6;
    Model model = support::toy_model(o);
    const auto before = model.probabilities(statements);
    const std::string metrics_before = evaluate(model, statements).to_json().dump();
    const fs::path path = fs::temp_directory_path() / ("biaslang_acceptance_rt_" + std::to_string(i) + ".blc");
    save_checkpoint(model, path.string());
    Model loaded = load_checkpoint(path.string());
    fs::remove(path);
    const auto after = loaded.probabilities(statements);
    const std::string metrics_after = evaluate(loaded, statements).to_json().dump();
    bool same = metrics_before == metrics_after && before.size() == after.size();
    for (std::size_t k = 0; same && k < before.size(); ++k) {
      same = std::bit_cast<std::uint64_t>(before[k]) == std::bit_cast<std::uint64_t>(after[k]);
    }
    identical += same;
  }
  std::string d = std::to_string(identical) + "/10 models bit-identical after reload";
  return identical == 10 ? pass(d) : fail(d);
}

// 11. Metrics against a brute-force confusion tally.
Outcome metrics_oracle() {
  Rng rng(23);
  std::vector<Label> pred, gold;
  std::vector<bool> pb, gb;
  for (int i = 0; i < 1000; ++i) {
    const bool p = rng.uniform() < 0.4, g = rng.uniform() < 0.45;
    pred.push_back(p ? Label::Biased : Label::Neutral);
    gold.push_back(g ? Label::Biased : Label::Neutral);
    pb.push_back(p);
    gb.push_back(g);
  }
  const Metrics m = score(pred, gold);
  const auto t = oracle::tally(pb, gb);
  const double acc = static_cast<double>(t.tp + t.tn) / 1000.0;
  const double p = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
  const double r = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
  const double f1 = 2 * p * r / (p + r);
  const bool counts = m.confusion.tp == t.tp && m.confusion.fp == t.fp && m.confusion.tn == t.tn && m.confusion.fn == t.fn;
  const bool values = std::abs(m.accuracy - acc) < 1e-12 && m.precision && std::abs(*m.precision - p) < 1e-12 &&
                      m.recall && std::abs(*m.recall - r) < 1e-12 && m.f1 && std::abs(*m.f1 - f1) < 1e-12;
  std::string d = "tp " + std::to_string(t.tp) + " fp " + std::to_string(t.fp) + " tn " + std::to_string(t.tn) + " fn " +
                  std::to_string(t.fn) + (counts && values ? ", all agree" : ", MISMATCH");
  return counts && values ? pass(d) : fail(d);
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradient_correctness},
      {2, "attention normalization", attention_normalization},
      {3, "padding invariance", padding_invariance},
      {4, "GRU oracle", gru_oracle},
      {5, "diff classification truth table", diff_truth_table},
      {6, "Krippendorff's alpha", krippendorff},
      {7, "synthetic separability", synthetic_separability},
      {8, "real-corpus ordering sanity", real_corpus},
      {9, "pipeline determinism", determinism},
      {10, "checkpoint round-trip", checkpoint_round_trip},
      {11, "metrics oracle", metrics_oracle},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::cout << "AC" << c.id << " " << tag << "  " << c.title << ": " << o.detail << std::endl;
    failed += o.status == Status::Fail;
  }
  return failed == 0 ? 0 : 1;
}
