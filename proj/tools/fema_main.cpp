// fema: feature-embedding domain adaptation for part-of-speech tagging.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fema/benchmark.hpp"
#include "fema/errors.hpp"
#include "fema/experiment.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;

void add_embedding_flags(CLI::App* cmd, fema::TrainConfig& c) {
  cmd->add_option("--dim", c.dim, "Embedding dimensionality")->capture_default_str();
  cmd->add_option("--negatives", c.negatives, "Negative samples per positive pair")->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "Passes over the unlabeled data")->capture_default_str();
  cmd->add_option("--learning-rate", c.learning_rate, "Initial learning rate")->capture_default_str();
  cmd->add_option("--min-count", c.min_count, "Features rarer than this map to UNK")->capture_default_str();
  cmd->add_option("--window", c.window, "Window for word-baseline mode")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
}

void add_tagger_flags(CLI::App* cmd, fema::TaggerConfig& c) {
  cmd->add_option("--lambda", c.lambda, "L2 regularization strength")->capture_default_str();
  cmd->add_option("--tagger-epochs", c.epochs, "Tagger passes over the labeled data")->capture_default_str();
}

std::vector<fema::Sentence> read_unlabeled(const std::vector<std::string>& paths, bool tagged) {
  std::vector<fema::Sentence> out;
  for (const auto& p : paths) {
    auto part = fema::read_sentences(p, tagged ? fema::CorpusFormat::kTagged : fema::CorpusFormat::kPlain);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature embeddings for unsupervised domain adaptation of POS taggers"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  std::string mode_name = "fema";
  double scale = 1.0;
  fema::TrainConfig emb;
  fema::TaggerConfig tag_cfg;

  // make-benchmark
  auto* bench_cmd = app.add_subcommand("make-benchmark", "Generate synthetic domain-shift corpora");
  fema::ShiftBenchmarkOptions bench_opts;
  std::string bench_dir;
  bench_cmd->add_option("--seed", seed)->capture_default_str();
  bench_cmd->add_option("--size", bench_opts.size, "Sentences per training corpus")->capture_default_str();
  bench_cmd->add_option("--swap-fraction", bench_opts.swap_fraction)->capture_default_str();
  bench_cmd->add_option("--words-per-tag", bench_opts.words_per_tag)->capture_default_str();
  bench_cmd->add_option("--out-dir", bench_dir)->required();

  // learn-embeddings
  auto* learn_cmd = app.add_subcommand("learn-embeddings", "Train feature (or word) embeddings");
  std::vector<std::string> unlabeled;
  bool unlabeled_tagged = false;
  std::string emb_out;
  learn_cmd->add_option("--unlabeled", unlabeled, "Unlabeled corpora (repeatable)")->required();
  learn_cmd->add_flag("--tagged-input", unlabeled_tagged, "Inputs are token<TAB>tag files");
  learn_cmd->add_option("--out", emb_out, "Embedding text file; sidecars use it as prefix")->required();
  learn_cmd->add_option("--mode", mode_name, "fema or word-baseline")->capture_default_str();
  learn_cmd->add_option("--seed", seed)->capture_default_str();
  add_embedding_flags(learn_cmd, emb);

  // train-tagger
  auto* train_cmd = app.add_subcommand("train-tagger", "Train the tagger on labeled source data");
  std::string train_path, model_dir, emb_path;
  train_cmd->add_option("--train", train_path, "Labeled token<TAB>tag corpus")->required();
  train_cmd->add_option("--embeddings", emb_path, "Embedding file from learn-embeddings");
  train_cmd->add_option("--mode", mode_name, "baseline, fema or word-baseline")->capture_default_str();
  train_cmd->add_option("--scale", scale, "Multiplier on the dense block")->capture_default_str();
  train_cmd->add_option("--seed", seed)->capture_default_str();
  train_cmd->add_option("--threads", tag_cfg.threads)->capture_default_str();
  train_cmd->add_option("--out", model_dir, "Model directory")->required();
  add_tagger_flags(train_cmd, tag_cfg);

  // tag
  auto* tag_cmd = app.add_subcommand("tag", "Tag whitespace-tokenized text");
  std::string input_path, output_path;
  tag_cmd->add_option("--model", model_dir)->required();
  tag_cmd->add_option("--input", input_path, "One sentence per line")->required();
  tag_cmd->add_option("--output", output_path, "token<TAB>tag output (default stdout)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Token accuracy on a labeled corpus");
  std::string data_path;
  eval_cmd->add_option("--model", model_dir)->required();
  eval_cmd->add_option("--data", data_path)->required();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Full adaptation protocol with a report");
  fema::ExperimentConfig exp;
  std::vector<std::string> target_names, target_unlabeled, target_dev, target_test;
  exp_cmd->add_option("--source-train", exp.source_train)->required();
  exp_cmd->add_option("--source-unlabeled", exp.source_unlabeled);
  exp_cmd->add_option("--target", target_names, "Target domain name (repeatable)")->required();
  exp_cmd->add_option("--target-unlabeled", target_unlabeled, "One per --target");
  exp_cmd->add_option("--target-dev", target_dev, "One per --target")->required();
  exp_cmd->add_option("--target-test", target_test, "One per --target")->required();
  exp_cmd->add_option("--mode", mode_name, "baseline, fema or word-baseline")->capture_default_str();
  exp_cmd->add_option("--scale", scale)->capture_default_str();
  exp_cmd->add_option("--seed", seed)->capture_default_str();
  exp_cmd->add_flag("--shared-embeddings", exp.shared_embeddings,
                    "One embedding model over every target instead of one per target");
  exp_cmd->add_option("--report", exp.report_path, "Report path (plus .kv sidecar)");
  exp_cmd->add_option("--model-dir", exp.model_dir, "Save one model per target here");
  add_embedding_flags(exp_cmd, emb);
  add_tagger_flags(exp_cmd, tag_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    const auto mode = fema::parse_mode(mode_name);
    emb.seed = seed;
    tag_cfg.seed = seed;

    if (*bench_cmd) {
      const auto bench = fema::make_shift_benchmark(seed, bench_opts);
      const auto files = fema::write_benchmark(bench, bench_dir);
      std::cout << "source_train=" << files.source_train << '\n'
                << "source_unlabeled=" << files.source_unlabeled << '\n'
                << "target_unlabeled=" << files.target_unlabeled << '\n'
                << "target_dev=" << files.target_dev << '\n'
                << "target_test=" << files.target_test << '\n'
                << "target_oov_rate=" << fema::oov_rate(bench.target_test, bench.source_train) << '\n';
    } else if (*learn_cmd) {
      const auto sentences = read_unlabeled(unlabeled, unlabeled_tagged);
      const auto model = fema::learn_embeddings(sentences, fema::default_template_set(), mode, emb);
      fema::save_embeddings(model, emb_out);
      std::cout << "rows=" << model.rows() << " dim=" << model.dim() << '\n';
    } else if (*train_cmd) {
      const auto labeled = fema::read_tagged_corpus(train_path);
      std::optional<fema::EmbeddingModel> embeddings;
      if (mode != fema::Mode::kBaseline) {
        if (emb_path.empty()) throw fema::ConfigError("--embeddings is required for mode " + mode_name);
        embeddings = fema::load_embeddings(emb_path);
      }
      const auto chain = fema::train_chain(labeled, fema::default_template_set(),
                                           embeddings ? &*embeddings : nullptr, mode, scale, tag_cfg);
      fema::save_chain(chain, model_dir);
      std::cout << "tags=" << chain.tagger.num_tags() << " sparse_dim=" << chain.tagger.sparse_dim()
                << " dense_dim=" << chain.tagger.dense_dim() << '\n';
    } else if (*tag_cmd) {
      const auto chain = fema::load_chain(model_dir);
      const auto sentences = fema::read_plain_corpus(input_path);
      std::vector<fema::TaggedSentence> tagged;
      for (const auto& s : sentences) {
        tagged.push_back({s.tokens, fema::tag_sentence(chain.tagger, chain.representation, s)});
      }
      if (output_path.empty()) {
        for (const auto& s : tagged) fema::write_tagged(std::cout, s);
      } else {
        fema::write_tagged_corpus(output_path, tagged);
      }
    } else if (*eval_cmd) {
      const auto chain = fema::load_chain(model_dir);
      const auto acc = fema::evaluate_counts(chain.tagger, chain.representation, fema::read_tagged_corpus(data_path));
      std::cout << "accuracy=" << acc.value() << " correct=" << acc.correct << " total=" << acc.total << '\n';
    } else if (*exp_cmd) {
      const auto n = target_names.size();
      if (target_dev.size() != n || target_test.size() != n ||
          (!target_unlabeled.empty() && target_unlabeled.size() != n)) {
        throw fema::ConfigError("--target, --target-unlabeled, --target-dev and --target-test must be given once per target");
      }
      for (std::size_t i = 0; i < n; ++i) {
        exp.targets.push_back({target_names[i], target_unlabeled.empty() ? "" : target_unlabeled[i],
                               target_dev[i], target_test[i]});
      }
      exp.mode = mode;
      exp.scale = scale;
      exp.seed = seed;
      exp.embedding = emb;
      exp.tagger = tag_cfg;
      std::cout << fema::run_experiment(exp).to_text();
    }
  } catch (const fema::ConfigError& e) {
    std::cerr << "fema: " << e.what() << '\n';
    return kUsage;
  } catch (const fema::NumericError& e) {
    std::cerr << "fema: numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "fema: " << e.what() << '\n';
    return kData;
  }
  return 0;
}
