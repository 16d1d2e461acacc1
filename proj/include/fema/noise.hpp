#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fema/features.hpp"

namespace fema {

class FeatureVocab;
class TemplateSet;

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Walker alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;
  // Throws std::invalid_argument if weights are empty, negative, or all zero.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t sample(Rng& rng) const;
  double probability(std::size_t i) const { return pmf_.at(i); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<double> pmf_;
};

// Unigram noise distribution exponent. Fixed: plain unigram counts.
inline constexpr double kNoisePower = 1.0;

// Per-template unigram noise distributions over a vocabulary.
class NoiseTable {
 public:
  NoiseTable() = default;
  // Builds tables for `templates` only. Throws DataError for a template with
  // zero total count.
  NoiseTable(const FeatureVocab& vocab, std::span<const std::size_t> templates);
  // Tables for every embedded template of the schema.
  NoiseTable(const FeatureVocab& vocab, const TemplateSet& schema);

  bool has(std::size_t t) const { return t < tables_.size() && tables_[t].size() > 0; }
  // Global feature id drawn from template t. Throws DataError if t has no table.
  FeatureId sample(std::size_t t, Rng& rng) const;
  double probability(std::size_t t, FeatureId local) const;

 private:
  std::vector<AliasTable> tables_;
  std::vector<FeatureId> offsets_;
};

}  // namespace fema
