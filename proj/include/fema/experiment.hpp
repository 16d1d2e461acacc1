#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fema/augment.hpp"
#include "fema/embedding.hpp"
#include "fema/tagger.hpp"

namespace fema {

// A trained representation plus the classifier on top of it.
struct TaggerChain {
  Representation representation;
  TaggerModel tagger;
};

// Directory layout: schema.txt, sparse.vocab, tagger.manifest(+.weights),
// and embeddings.txt with sidecars when the mode uses embeddings.
void save_chain(const TaggerChain& chain, const std::string& dir);
TaggerChain load_chain(const std::string& dir);

// Builds the sparse vocabulary from the labeled data (min_count 1) and fits
// the tagger. `embeddings` is ignored in baseline mode.
TaggerChain train_chain(std::span<const TaggedSentence> labeled, const TemplateSet& schema,
                        const EmbeddingModel* embeddings, Mode mode, double scale,
                        const TaggerConfig& config);

// Embeddings for `mode` from unlabeled sentences (kFema or kWord).
EmbeddingModel learn_embeddings(std::span<const Sentence> unlabeled, const TemplateSet& schema,
                                Mode mode, const TrainConfig& config);

struct TargetDomain {
  std::string name;
  std::string unlabeled;
  std::string dev;
  std::string test;
};

struct ExperimentConfig {
  std::string source_train;
  std::string source_unlabeled;
  std::vector<TargetDomain> targets;
  TrainConfig embedding;
  TaggerConfig tagger;
  Mode mode = Mode::kFema;
  double scale = 1.0;
  // false: one embedding model per target (source + that target's unlabeled data).
  // true: one model over source + every target's unlabeled data.
  bool shared_embeddings = false;
  std::uint64_t seed = 1;
  std::string report_path;  // optional; sidecar at report_path + ".kv"
  std::string model_dir;    // optional; one chain per target under model_dir/<name>

  // Throws ConfigError for missing paths or invalid hyperparameters.
  void validate() const;
};

struct DomainResult {
  std::string name;
  Accuracy dev;
  Accuracy test;
};

struct FileAccess {
  std::string phase;
  std::string path;
};

struct PhaseTimes {
  double extract_seconds = 0;
  double embedding_seconds = 0;
  double tagger_seconds = 0;
  double evaluate_seconds = 0;
};

struct Report {
  ExperimentConfig config;
  std::vector<DomainResult> domains;
  PhaseTimes times;
  std::vector<FileAccess> accesses;

  // Accuracy table plus a config echo. Timing lines start with "time".
  std::string to_text(bool with_times = true) const;
  std::string to_key_values(bool with_times = true) const;
};

// Learn embeddings on unlabeled source + target, train the tagger on labeled
// source, evaluate on each target's dev and test sets. Errors are rethrown
// with the failing phase in the message; nothing is written on failure.
Report run_experiment(const ExperimentConfig& config);

}  // namespace fema
