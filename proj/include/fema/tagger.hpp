#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fema/augment.hpp"
#include "fema/corpus.hpp"
#include "fema/matrix.hpp"

namespace fema {

struct TaggerConfig {
  double lambda = 1e-5;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 1;  // tags train independently

  void validate() const;
};

struct LabeledVector {
  AugmentedVector x;
  std::size_t tag = 0;
};

// One-vs-rest linear classifier. Each tag's weight row covers
// [sparse ids | bias | dense coordinates]; the bias is an always-on sparse
// feature at index sparse_dim.
class TaggerModel {
 public:
  TaggerModel() = default;
  TaggerModel(TagInventory tags, std::size_t sparse_dim, std::size_t dense_dim);

  const TagInventory& tags() const { return tags_; }
  std::size_t num_tags() const { return tags_.size(); }
  std::size_t sparse_dim() const { return sparse_dim_; }
  std::size_t dense_dim() const { return dense_dim_; }
  std::size_t bias_index() const { return sparse_dim_; }
  std::size_t width() const { return sparse_dim_ + 1 + dense_dim_; }

  Matrix& weights() { return weights_; }
  const Matrix& weights() const { return weights_; }

  // Free-form key/value pairs persisted in the manifest.
  std::map<std::string, std::string> metadata;

  bool operator==(const TaggerModel& other) const {
    return tags_.names() == other.tags_.names() && sparse_dim_ == other.sparse_dim_ &&
           dense_dim_ == other.dense_dim_ && weights_ == other.weights_ &&
           metadata == other.metadata;
  }

 private:
  TagInventory tags_;
  std::size_t sparse_dim_ = 0;
  std::size_t dense_dim_ = 0;
  Matrix weights_;
};

// w . x including the bias. Throws std::invalid_argument on dimension mismatch.
double linear_score(std::span<const double> w, const AugmentedVector& x, std::size_t sparse_dim);

std::vector<double> score(const TaggerModel& model, const AugmentedVector& x);
// argmax of score; ties go to the lowest tag id.
std::size_t predict(const TaggerModel& model, const AugmentedVector& x);

// Per tag, stochastic subgradient descent (step 1/(lambda t)) on
//   (lambda/2)|w|^2 + (1/N) sum_i max(0, 1 - s_i w.x_i),  s_i = +1 iff tag_i == y.
// Example order is reshuffled every epoch from config.seed.
TaggerModel fit(std::span<const LabeledVector> data, const TagInventory& tags,
                std::size_t sparse_dim, std::size_t dense_dim, const TaggerConfig& config);

// Full-batch binary objective for tag y and one of its subgradients.
double svm_objective(std::span<const double> w, std::span<const LabeledVector> data,
                     std::size_t tag, double lambda, std::size_t sparse_dim);
std::vector<double> svm_subgradient(std::span<const double> w,
                                    std::span<const LabeledVector> data, std::size_t tag,
                                    double lambda, std::size_t sparse_dim);

// Independent per-token classification.
std::vector<std::size_t> tag_ids(const TaggerModel& model, const Representation& rep,
                                 const Sentence& sentence);
std::vector<std::string> tag_sentence(const TaggerModel& model, const Representation& rep,
                                      const Sentence& sentence);

struct Accuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

// Token accuracy. Throws DataError for an empty corpus or a gold tag outside
// the model's inventory.
Accuracy evaluate_counts(const TaggerModel& model, const Representation& rep,
                         std::span<const TaggedSentence> corpus);
double evaluate(const TaggerModel& model, const Representation& rep,
                std::span<const TaggedSentence> corpus);

// Featurizes every token of a tagged corpus against the inventory.
std::vector<LabeledVector> featurize_corpus(const Representation& rep, const TagInventory& tags,
                                            std::span<const TaggedSentence> corpus);

// Manifest text at `path`, weights at path + ".weights". Layout in docs/FORMATS.md.
void save_tagger(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger(const std::string& path);

}  // namespace fema
