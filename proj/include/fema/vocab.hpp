#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fema/features.hpp"

namespace fema {

// Per-template feature dictionaries with occurrence counts.
//
// Local id 0 of every template is its UNK entry (value ""), which absorbs
// occurrences of features dropped by min_count. Remaining ids follow
// first-occurrence order. Global id = offset(t) + local id.
class FeatureVocab {
 public:
  static constexpr FeatureId kUnkLocal = 0;

  FeatureVocab() = default;
  explicit FeatureVocab(std::vector<std::string> template_names);

  std::size_t num_templates() const { return names_.size(); }
  const std::string& template_name(std::size_t t) const { return names_.at(t); }
  std::size_t size(std::size_t t) const { return values_.at(t).size(); }
  std::size_t total_size() const { return offsets_.back(); }
  FeatureId offset(std::size_t t) const { return offsets_.at(t); }
  FeatureId unk(std::size_t t) const { return offsets_.at(t) + kUnkLocal; }

  std::optional<FeatureId> find_local(std::size_t t, std::string_view value) const;
  // Global id, or UNK of template t.
  FeatureId lookup(std::size_t t, std::string_view value) const;

  const std::string& value(std::size_t t, FeatureId local) const { return values_.at(t).at(local); }
  std::uint64_t count(std::size_t t, FeatureId local) const { return counts_.at(t).at(local); }
  std::span<const std::uint64_t> counts(std::size_t t) const { return counts_.at(t); }
  std::uint64_t total_count(std::size_t t) const;

  std::size_t template_of(FeatureId global) const;
  FeatureId local_of(FeatureId global) const { return global - offset(template_of(global)); }

  // Appends a new value or bumps its count; returns the local id.
  FeatureId add(std::size_t t, std::string_view value, std::uint64_t count);
  void add_unk_count(std::size_t t, std::uint64_t count) { counts_.at(t).at(kUnkLocal) += count; }

  // Text form: one "template<TAB>value<TAB>count" line per feature, id order.
  void write(std::ostream& out) const;
  static FeatureVocab read(std::istream& in);
  void save(const std::string& path) const;
  static FeatureVocab load(const std::string& path);

  bool operator==(const FeatureVocab& other) const {
    return names_ == other.names_ && values_ == other.values_ && counts_ == other.counts_;
  }

 private:
  void rebuild_offsets();

  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> values_;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<std::unordered_map<std::string, FeatureId>> index_;
  std::vector<FeatureId> offsets_{0};
};

// Streaming counter; finish() applies the min_count threshold.
class VocabBuilder {
 public:
  explicit VocabBuilder(const TemplateSet& schema);

  void add(const FeatureValues& values);
  void add_sentence(const Sentence& sentence);
  std::size_t num_instances() const { return num_instances_; }

  // Throws DataError("no instances") when nothing was added.
  FeatureVocab finish(std::uint64_t min_count) const;

 private:
  const TemplateSet& schema_;
  FeatureVocab raw_;
  std::size_t num_instances_ = 0;
};

FeatureVocab build_vocab(std::span<const FeatureValues> instances, const TemplateSet& schema,
                         std::uint64_t min_count);
FeatureVocab build_vocab(std::span<const Sentence> sentences, const TemplateSet& schema,
                         std::uint64_t min_count);

}  // namespace fema
