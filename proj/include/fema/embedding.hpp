#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fema/features.hpp"
#include "fema/matrix.hpp"
#include "fema/noise.hpp"
#include "fema/vocab.hpp"

namespace fema {

struct TrainConfig {
  std::size_t dim = 100;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::uint64_t min_count = 2;
  std::size_t window = 5;  // word baseline only

  // Throws ConfigError.
  void validate() const;
};

// Input (U) and output (V) embeddings for every feature of the embedded
// templates. Rows of embedded template t are contiguous, in local-id order.
class EmbeddingModel {
 public:
  static constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();

  EmbeddingModel() = default;
  // U = V = 0.
  EmbeddingModel(TemplateSet schema, FeatureVocab vocab, std::size_t dim);

  // U rows uniform in [-0.5/d, 0.5/d], V = 0.
  static EmbeddingModel initialized(TemplateSet schema, FeatureVocab vocab, std::size_t dim,
                                    std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return input_.rows(); }
  const TemplateSet& schema() const { return schema_; }
  const FeatureVocab& vocab() const { return vocab_; }

  bool embeds(std::size_t t) const { return row_offsets_.at(t) != kNoRow; }
  // Throws std::out_of_range for ids outside the embedded templates.
  std::size_t row_of(FeatureId global) const;
  std::size_t row_of(std::size_t t, FeatureId local) const;
  FeatureId feature_of_row(std::size_t row) const;

  Matrix& input() { return input_; }
  const Matrix& input() const { return input_; }
  Matrix& output() { return output_; }
  const Matrix& output() const { return output_; }

  std::span<const double> input_row(FeatureId global) const { return input_.row(row_of(global)); }
  std::span<const double> output_row(FeatureId global) const { return output_.row(row_of(global)); }

  bool finite() const;
  bool operator==(const EmbeddingModel& other) const {
    return dim_ == other.dim_ && schema_ == other.schema_ && vocab_ == other.vocab_ &&
           input_ == other.input_ && output_ == other.output_;
  }

 private:
  void layout();

  TemplateSet schema_;
  FeatureVocab vocab_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> row_templates_;  // first row of each embedded template
  Matrix input_;
  Matrix output_;
};

// Sampled negative-sampling objective of one instance, averaged over the
// embedded templates and summed over ordered pairs t != t'.
double instance_objective(const EmbeddingModel& model, const Instance& instance,
                          const NoiseTable& noise, std::size_t negatives, Rng& rng);

// Called after each completed epoch (1-based).
using EpochCallback = std::function<void(std::size_t epoch, const EmbeddingModel&)>;

// Stochastic gradient ascent on the negative-sampling objective over all
// ordered embedded-template pairs of every instance. Single-threaded runs
// are bit-reproducible for a fixed seed; with threads > 1 workers update
// shared rows without locking.
EmbeddingModel train(std::span<const Instance> instances, const FeatureVocab& vocab,
                     const TemplateSet& schema, const TrainConfig& config,
                     const EpochCallback& on_epoch = {});

// Single lexical template "word": one shared vocabulary for every window offset.
TemplateSet word_schema();

// (center, context) pairs within `window` tokens on each side, clipped at
// sentence boundaries. Ids are global ids of word_schema's vocabulary.
template <typename Fn>
void for_each_window_pair(std::span<const FeatureId> sentence, std::size_t window, Fn&& fn) {
  const std::size_t n = sentence.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(n, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (j != i) fn(sentence[i], sentence[j]);
    }
  }
}

std::vector<std::pair<FeatureId, FeatureId>> window_pairs(std::span<const FeatureId> sentence,
                                                          std::size_t window);

// Classic window skip-gram run through the same update engine.
EmbeddingModel train_word_baseline(std::span<const Sentence> sentences, const TrainConfig& config,
                                   const EpochCallback& on_epoch = {});

// word2vec text format: "COUNT DIM" header, then "template=value v1 ... vd"
// per row of U. V goes to path + ".out"; the vocabulary with counts to
// path + ".vocab" and the schema to path + ".schema".
void save_embeddings(const EmbeddingModel& model, const std::string& path);
// Uses the ".schema" sidecar. The ".vocab" sidecar is used when present,
// otherwise the vocabulary is rebuilt from the row labels with zero counts.
// A missing ".out" file leaves V at zero.
EmbeddingModel load_embeddings(const std::string& path);
EmbeddingModel load_embeddings(const std::string& path, const TemplateSet& schema);

}  // namespace fema
