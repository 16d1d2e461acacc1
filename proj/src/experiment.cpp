#include "fema/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include "fema/errors.hpp"
#include "text_util.hpp"

namespace fema {

namespace fs = std::filesystem;

namespace {

std::vector<Sentence> sentences_of(std::span<const TaggedSentence> corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(s.sentence());
  return out;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

EmbeddingModel learn_embeddings(std::span<const Sentence> unlabeled, const TemplateSet& schema,
                                Mode mode, const TrainConfig& config) {
  config.validate();
  switch (mode) {
    case Mode::kBaseline:
      throw ConfigError("baseline mode does not learn embeddings");
    case Mode::kWord:
      return train_word_baseline(unlabeled, config);
    case Mode::kFema:
      break;
  }
  VocabBuilder builder(schema);
  for (const auto& s : unlabeled) builder.add_sentence(s);
  const FeatureVocab vocab = builder.finish(config.min_count);
  std::vector<Instance> instances;
  instances.reserve(builder.num_instances());
  for (const auto& s : unlabeled) {
    for (std::size_t i = 0; i < s.size(); ++i) instances.push_back(encode(extract(s, i, schema), vocab));
  }
  return train(instances, vocab, schema, config);
}

TaggerChain train_chain(std::span<const TaggedSentence> labeled, const TemplateSet& schema,
                        const EmbeddingModel* embeddings, Mode mode, double scale,
                        const TaggerConfig& config) {
  config.validate();
  if (labeled.empty()) throw DataError("empty training set");
  const auto sentences = sentences_of(labeled);
  FeatureVocab sparse = build_vocab(std::span<const Sentence>(sentences), schema, 1);
  TaggerChain chain;
  if (mode == Mode::kBaseline) {
    chain.representation = Representation(schema, std::move(sparse));
  } else {
    if (embeddings == nullptr) throw ConfigError("mode needs an embedding model");
    chain.representation = Representation(schema, std::move(sparse), *embeddings, mode, scale);
  }
  const auto tags = TagInventory::from_corpus(labeled);
  const auto data = featurize_corpus(chain.representation, tags, labeled);
  chain.tagger = fit(data, tags, chain.representation.sparse_dim(),
                     chain.representation.dense_dim(), config);
  chain.tagger.metadata["mode"] = std::string(to_string(mode));
  chain.tagger.metadata["scale"] = detail::format_double(chain.representation.scale());
  chain.tagger.metadata["schema"] = "schema.txt";
  return chain;
}

void save_chain(const TaggerChain& chain, const std::string& dir) {
  fs::create_directories(dir);
  const auto& rep = chain.representation;
  rep.schema().save(join(dir, "schema.txt"));
  rep.sparse_vocab().save(join(dir, "sparse.vocab"));
  TaggerModel tagger = chain.tagger;
  tagger.metadata["mode"] = std::string(to_string(rep.mode()));
  tagger.metadata["scale"] = detail::format_double(rep.scale());
  tagger.metadata["schema"] = "schema.txt";
  if (rep.embeddings()) {
    tagger.metadata["embeddings"] = "embeddings.txt";
    save_embeddings(*rep.embeddings(), join(dir, "embeddings.txt"));
  }
  save_tagger(tagger, join(dir, "tagger.manifest"));
}

TaggerChain load_chain(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("model directory " + dir + " does not exist");
  TaggerChain chain;
  chain.tagger = load_tagger(join(dir, "tagger.manifest"));
  const auto meta = [&](const std::string& key) -> std::string {
    const auto it = chain.tagger.metadata.find(key);
    if (it == chain.tagger.metadata.end()) throw DataError(dir + ": tagger manifest lacks meta." + key);
    return it->second;
  };
  auto schema = TemplateSet::load(join(dir, meta("schema")));
  auto sparse = FeatureVocab::load(join(dir, "sparse.vocab"));
  Mode mode;
  try {
    mode = parse_mode(meta("mode"));
  } catch (const ConfigError& e) {
    throw DataError(dir + ": " + e.what());
  }
  const auto scale = detail::parse_double(meta("scale"));
  if (!scale) throw DataError(dir + ": bad scale in tagger manifest");
  try {
    if (mode == Mode::kBaseline) {
      chain.representation = Representation(std::move(schema), std::move(sparse));
    } else {
      chain.representation = Representation(std::move(schema), std::move(sparse),
                                            load_embeddings(join(dir, meta("embeddings"))), mode, *scale);
    }
  } catch (const ConfigError& e) {
    throw DataError(dir + ": " + e.what());
  }
  if (chain.representation.sparse_dim() != chain.tagger.sparse_dim() ||
      chain.representation.dense_dim() != chain.tagger.dense_dim()) {
    throw DataError(dir + ": tagger dimensions do not match the stored representation");
  }
  return chain;
}

void ExperimentConfig::validate() const {
  const auto need = [](const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError(what + " path is required");
    if (!fs::exists(path)) throw ConfigError(what + " " + path + " does not exist");
  };
  need(source_train, "labeled source");
  if (mode != Mode::kBaseline) need(source_unlabeled, "unlabeled source");
  if (targets.empty()) throw ConfigError("at least one target domain is required");
  std::set<std::string> names;
  for (const auto& t : targets) {
    if (t.name.empty() || detail::split_whitespace(t.name).size() != 1 || t.name.find('/') != std::string::npos) {
      throw ConfigError("invalid target domain name '" + t.name + "'");
    }
    if (!names.insert(t.name).second) throw ConfigError("duplicate target domain " + t.name);
    if (mode != Mode::kBaseline) need(t.unlabeled, "unlabeled target (" + t.name + ")");
    need(t.dev, "target dev (" + t.name + ")");
    need(t.test, "target test (" + t.name + ")");
  }
  embedding.validate();
  tagger.validate();
  if (!(scale >= 0) || !std::isfinite(scale)) throw ConfigError("scale must be finite and >= 0");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn, prefixing any error with the phase name while keeping its category.
template <typename Fn>
auto in_phase(const char* phase, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string("phase ") + phase + ": ";
  try {
    return fn();
  } catch (const NumericError& e) {
    throw NumericError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

std::string percent(const Accuracy& a) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100.0 * a.value();
  return out.str();
}

// Removes directories created by a failed run.
class Cleanup {
 public:
  void track(const std::string& dir) {
    if (!fs::exists(dir)) created_.push_back(dir);
  }
  void release() { created_.clear(); }
  ~Cleanup() {
    for (auto it = created_.rbegin(); it != created_.rend(); ++it) {
      std::error_code ec;
      fs::remove_all(*it, ec);
    }
  }

 private:
  std::vector<std::string> created_;
};

}  // namespace

Report run_experiment(const ExperimentConfig& input) {
  input.validate();
  Report report;
  report.config = input;
  ExperimentConfig& config = report.config;
  config.embedding.seed = config.seed;
  config.tagger.seed = config.seed;
  const TemplateSet schema = default_template_set();
  Cleanup cleanup;

  auto read_tagged = [&](const char* phase, const std::string& path) {
    report.accesses.push_back({phase, path});
    return read_tagged_corpus(path);
  };
  auto read_plain = [&](const char* phase, const std::string& path) {
    report.accesses.push_back({phase, path});
    return read_plain_corpus(path);
  };

  // (1) corpora for representation learning and training
  auto start = Clock::now();
  std::vector<TaggedSentence> labeled;
  std::vector<Sentence> source_unlabeled;
  std::vector<std::vector<Sentence>> target_unlabeled(config.targets.size());
  in_phase("extract", [&] {
    labeled = read_tagged("extract", config.source_train);
    if (config.mode == Mode::kBaseline) return;
    source_unlabeled = read_plain("extract", config.source_unlabeled);
    for (std::size_t i = 0; i < config.targets.size(); ++i) {
      target_unlabeled[i] = read_plain("extract", config.targets[i].unlabeled);
    }
  });
  report.times.extract_seconds = seconds_since(start);

  auto build_chain = [&](const std::vector<std::size_t>& domains) {
    std::optional<EmbeddingModel> embeddings;
    if (config.mode != Mode::kBaseline) {
      auto t0 = Clock::now();
      embeddings = in_phase("embed", [&] {
        std::vector<Sentence> unlabeled = source_unlabeled;
        for (const auto d : domains) {
          unlabeled.insert(unlabeled.end(), target_unlabeled[d].begin(), target_unlabeled[d].end());
        }
        return learn_embeddings(unlabeled, schema, config.mode, config.embedding);
      });
      report.times.embedding_seconds += seconds_since(t0);
    }
    auto t0 = Clock::now();
    auto chain = in_phase("train-tagger", [&] {
      return train_chain(labeled, schema, embeddings ? &*embeddings : nullptr, config.mode,
                         config.scale, config.tagger);
    });
    report.times.tagger_seconds += seconds_since(t0);
    return chain;
  };

  auto evaluate_domain = [&](const TaggerChain& chain, std::size_t d) {
    const auto& target = config.targets[d];
    auto t0 = Clock::now();
    in_phase("evaluate", [&] {
      DomainResult result{target.name, {}, {}};
      const auto dev = read_tagged("evaluate", target.dev);
      result.dev = evaluate_counts(chain.tagger, chain.representation, dev);
      const auto test = read_tagged("evaluate", target.test);
      result.test = evaluate_counts(chain.tagger, chain.representation, test);
      report.domains.push_back(std::move(result));
      if (!config.model_dir.empty()) {
        cleanup.track(config.model_dir);
        const auto dir = join(config.model_dir, target.name);
        cleanup.track(dir);
        save_chain(chain, dir);
      }
    });
    report.times.evaluate_seconds += seconds_since(t0);
  };

  std::vector<std::size_t> all(config.targets.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (config.mode == Mode::kBaseline || config.shared_embeddings) {
    const auto chain = build_chain(all);
    for (const auto d : all) evaluate_domain(chain, d);
  } else {
    for (const auto d : all) evaluate_domain(build_chain({d}), d);
  }

  if (!config.report_path.empty()) {
    in_phase("report", [&] {
      detail::AtomicOutput text(config.report_path);
      detail::AtomicOutput kv(config.report_path + ".kv");
      text.stream() << report.to_text();
      kv.stream() << report.to_key_values();
      text.commit();
      kv.commit();
    });
  }
  cleanup.release();
  return report;
}

std::string Report::to_text(bool with_times) const {
  std::ostringstream out;
  out << "fema experiment report\n\n";
  const auto row = [&](const std::string& key, const auto& value) {
    out << std::left << std::setw(18) << key << value << '\n';
  };
  row("mode", to_string(config.mode));
  row("seed", config.seed);
  row("dim", config.embedding.dim);
  row("negatives", config.embedding.negatives);
  row("epochs", config.embedding.epochs);
  row("learning_rate", detail::format_double(config.embedding.learning_rate));
  row("min_count", config.embedding.min_count);
  row("window", config.embedding.window);
  row("threads", config.embedding.threads);
  row("scale", detail::format_double(config.scale));
  row("tagger_lambda", detail::format_double(config.tagger.lambda));
  row("tagger_epochs", config.tagger.epochs);
  row("embeddings", config.shared_embeddings ? "shared" : "per-target");
  out << '\n' << std::left << std::setw(18) << "target" << std::setw(10) << "dev" << "test\n";
  for (const auto& d : domains) {
    out << std::left << std::setw(18) << d.name << std::setw(10) << percent(d.dev) << percent(d.test) << '\n';
  }
  if (with_times) {
    out << '\n';
    row("time_extract_s", detail::format_double(times.extract_seconds));
    row("time_embedding_s", detail::format_double(times.embedding_seconds));
    row("time_tagger_s", detail::format_double(times.tagger_seconds));
    row("time_evaluate_s", detail::format_double(times.evaluate_seconds));
  }
  return out.str();
}

std::string Report::to_key_values(bool with_times) const {
  std::ostringstream out;
  out << "mode=" << to_string(config.mode) << '\n';
  out << "seed=" << config.seed << '\n';
  out << "dim=" << config.embedding.dim << '\n';
  out << "negatives=" << config.embedding.negatives << '\n';
  out << "epochs=" << config.embedding.epochs << '\n';
  out << "learning_rate=" << detail::format_double(config.embedding.learning_rate) << '\n';
  out << "min_count=" << config.embedding.min_count << '\n';
  out << "window=" << config.embedding.window << '\n';
  out << "threads=" << config.embedding.threads << '\n';
  out << "scale=" << detail::format_double(config.scale) << '\n';
  out << "tagger_lambda=" << detail::format_double(config.tagger.lambda) << '\n';
  out << "tagger_epochs=" << config.tagger.epochs << '\n';
  out << "shared_embeddings=" << (config.shared_embeddings ? 1 : 0) << '\n';
  for (const auto& d : domains) {
    for (const auto& [split, acc] : {std::pair{"dev", d.dev}, std::pair{"test", d.test}}) {
      const std::string key = "target." + d.name + "." + split;
      out << key << ".accuracy=" << detail::format_double(acc.value()) << '\n';
      out << key << ".correct=" << acc.correct << '\n';
      out << key << ".total=" << acc.total << '\n';
    }
  }
  if (with_times) {
    out << "time.extract_seconds=" << detail::format_double(times.extract_seconds) << '\n';
    out << "time.embedding_seconds=" << detail::format_double(times.embedding_seconds) << '\n';
    out << "time.tagger_seconds=" << detail::format_double(times.tagger_seconds) << '\n';
    out << "time.evaluate_seconds=" << detail::format_double(times.evaluate_seconds) << '\n';
  }
  return out.str();
}

}  // namespace fema
