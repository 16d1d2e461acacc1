#include "fema/augment.hpp"

#include <cmath>
#include <stdexcept>

#include "fema/errors.hpp"

namespace fema {

namespace {

void append_squashed(std::vector<float>& dense, std::span<const double> row, double scale) {
  for (const double x : row) dense.push_back(static_cast<float>(scale * std::tanh(x)));
}

void check_scale(double scale) {
  if (!(scale >= 0) || !std::isfinite(scale)) {
    throw std::invalid_argument("dense scale must be finite and non-negative");
  }
}

}  // namespace

AugmentedVector augment(const Instance& sparse, const Instance& embedded,
                        const EmbeddingModel& model, double scale) {
  check_scale(scale);
  if (embedded.active.size() != model.schema().size()) {
    throw std::invalid_argument("instance is not encoded against the embedding schema");
  }
  AugmentedVector x;
  x.sparse = sparse.active;
  x.scale = scale;
  x.dense.reserve(model.schema().num_embedded() * model.dim());
  for (const auto t : model.schema().embedded()) {
    append_squashed(x.dense, model.input_row(embedded.active[t]), scale);
  }
  return x;
}

AugmentedVector augment(const Instance& instance, const EmbeddingModel& model, double scale) {
  return augment(instance, instance, model, scale);
}

AugmentedVector sparse_only(const Instance& instance) {
  AugmentedVector x;
  x.sparse = instance.active;
  x.scale = 0.0;
  return x;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kBaseline: return "baseline";
    case Mode::kFema: return "fema";
    case Mode::kWord: return "word-baseline";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::kBaseline;
  if (name == "fema") return Mode::kFema;
  if (name == "word-baseline" || name == "word") return Mode::kWord;
  throw ConfigError("unknown mode '" + std::string(name) + "' (baseline, fema, word-baseline)");
}

Representation::Representation(TemplateSet schema, FeatureVocab sparse_vocab)
    : schema_(std::move(schema)), sparse_vocab_(std::move(sparse_vocab)) {
  if (sparse_vocab_.num_templates() != schema_.size()) {
    throw ConfigError("sparse vocabulary was not built with this schema");
  }
}

Representation::Representation(TemplateSet schema, FeatureVocab sparse_vocab,
                               EmbeddingModel embeddings, Mode mode, double scale)
    : Representation(std::move(schema), std::move(sparse_vocab)) {
  check_scale(scale);
  mode_ = mode;
  scale_ = scale;
  switch (mode) {
    case Mode::kBaseline:
      return;
    case Mode::kFema:
      if (!(embeddings.schema() == schema_)) {
        throw ConfigError("feature embeddings were trained with a different schema");
      }
      break;
    case Mode::kWord:
      if (!(embeddings.schema() == word_schema())) {
        throw ConfigError("word-baseline mode needs word embeddings");
      }
      for (std::size_t t = 0; t < schema_.size(); ++t) {
        if (schema_[t].kind == TemplateKind::kLexical) word_templates_.push_back(t);
      }
      break;
  }
  embeddings_ = std::move(embeddings);
}

std::size_t Representation::dense_dim() const {
  switch (mode_) {
    case Mode::kBaseline: return 0;
    case Mode::kFema: return schema_.num_embedded() * embeddings_->dim();
    case Mode::kWord: return word_templates_.size() * embeddings_->dim();
  }
  return 0;
}

AugmentedVector Representation::featurize(const Sentence& sentence, std::size_t position) const {
  const auto values = extract(sentence, position, schema_);
  const auto sparse = encode(values, sparse_vocab_);
  switch (mode_) {
    case Mode::kBaseline:
      return sparse_only(sparse);
    case Mode::kFema:
      return augment(sparse, encode(values, embeddings_->vocab()), *embeddings_, scale_);
    case Mode::kWord: {
      AugmentedVector x;
      x.sparse = sparse.active;
      x.scale = scale_;
      x.dense.reserve(dense_dim());
      const auto& words = embeddings_->vocab();
      for (const auto t : word_templates_) {
        append_squashed(x.dense, embeddings_->input_row(words.lookup(0, values[t])), scale_);
      }
      return x;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<AugmentedVector> Representation::featurize(const Sentence& sentence) const {
  std::vector<AugmentedVector> out;
  out.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) out.push_back(featurize(sentence, i));
  return out;
}

}  // namespace fema
