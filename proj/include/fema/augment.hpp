#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fema/embedding.hpp"
#include "fema/features.hpp"
#include "fema/vocab.hpp"

namespace fema {

// x (+) scale * tanh[u_f(1) (+) ... (+) u_f(T)]. The sparse part is a set of
// active ids with implicit value 1; the dense part is already scaled.
struct AugmentedVector {
  std::vector<FeatureId> sparse;
  std::vector<float> dense;
  double scale = 1.0;
};

// Sparse part = instance ids; dense part from the embedded templates of the
// same instance, which must be encoded against model.vocab().
AugmentedVector augment(const Instance& instance, const EmbeddingModel& model, double scale);
// Sparse ids from one vocabulary, embedding rows from another encoding of the same position.
AugmentedVector augment(const Instance& sparse, const Instance& embedded,
                        const EmbeddingModel& model, double scale);
AugmentedVector sparse_only(const Instance& instance);

enum class Mode { kBaseline, kFema, kWord };

std::string_view to_string(Mode mode);
// Throws ConfigError.
Mode parse_mode(std::string_view name);

// Everything needed to turn a sentence position into an AugmentedVector:
// extract -> encode -> augment.
class Representation {
 public:
  Representation() = default;
  // Baseline: sparse features only.
  Representation(TemplateSet schema, FeatureVocab sparse_vocab);
  // kFema: model over `schema`. kWord: model over word_schema(); the lexical
  // templates of `schema` look up their token in the word vocabulary.
  Representation(TemplateSet schema, FeatureVocab sparse_vocab, EmbeddingModel embeddings,
                 Mode mode, double scale);

  Mode mode() const { return mode_; }
  double scale() const { return scale_; }
  const TemplateSet& schema() const { return schema_; }
  const FeatureVocab& sparse_vocab() const { return sparse_vocab_; }
  const std::optional<EmbeddingModel>& embeddings() const { return embeddings_; }

  std::size_t sparse_dim() const { return sparse_vocab_.total_size(); }
  std::size_t dense_dim() const;

  AugmentedVector featurize(const Sentence& sentence, std::size_t position) const;
  std::vector<AugmentedVector> featurize(const Sentence& sentence) const;

 private:
  TemplateSet schema_;
  FeatureVocab sparse_vocab_;
  std::optional<EmbeddingModel> embeddings_;
  Mode mode_ = Mode::kBaseline;
  double scale_ = 1.0;
  std::vector<std::size_t> word_templates_;  // kWord: lexical templates of schema_
};

}  // namespace fema
