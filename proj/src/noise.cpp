#include "fema/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "fema/errors.hpp"
#include "fema/vocab.hpp"

namespace fema {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table needs at least one weight");
  double total = 0;
  for (const double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("alias weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("alias weights sum to zero");

  pmf_.resize(n);
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    pmf_[i] = weights[i] / total;
    scaled[i] = pmf_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (const auto i : large) prob_[i] = 1.0;
  for (const auto i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(Rng& rng) const {
  const double x = uniform01(rng) * static_cast<double>(prob_.size());
  auto i = static_cast<std::size_t>(x);
  if (i >= prob_.size()) i = prob_.size() - 1;
  return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
}

NoiseTable::NoiseTable(const FeatureVocab& vocab, std::span<const std::size_t> templates)
    : tables_(vocab.num_templates()), offsets_(vocab.num_templates()) {
  for (const auto t : templates) {
    const auto counts = vocab.counts(t);
    std::vector<double> weights(counts.size());
    double total = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      weights[j] = std::pow(static_cast<double>(counts[j]), kNoisePower);
      total += weights[j];
    }
    if (total <= 0) {
      throw DataError("template " + vocab.template_name(t) + " has an empty noise distribution");
    }
    tables_[t] = AliasTable(weights);
    offsets_[t] = vocab.offset(t);
  }
}

NoiseTable::NoiseTable(const FeatureVocab& vocab, const TemplateSet& schema)
    : NoiseTable(vocab, schema.embedded()) {}

FeatureId NoiseTable::sample(std::size_t t, Rng& rng) const {
  if (!has(t)) throw DataError("no noise distribution for template " + std::to_string(t));
  return offsets_[t] + static_cast<FeatureId>(tables_[t].sample(rng));
}

double NoiseTable::probability(std::size_t t, FeatureId local) const {
  if (!has(t)) throw DataError("no noise distribution for template " + std::to_string(t));
  return tables_[t].probability(local);
}

}  // namespace fema
