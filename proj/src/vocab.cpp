#include "fema/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "fema/errors.hpp"
#include "text_util.hpp"

namespace fema {

FeatureVocab::FeatureVocab(std::vector<std::string> template_names)
    : names_(std::move(template_names)),
      values_(names_.size(), std::vector<std::string>{std::string()}),
      counts_(names_.size(), std::vector<std::uint64_t>{0}),
      index_(names_.size()) {
  rebuild_offsets();
}

void FeatureVocab::rebuild_offsets() {
  offsets_.assign(1, 0);
  for (const auto& v : values_) offsets_.push_back(offsets_.back() + static_cast<FeatureId>(v.size()));
}

std::optional<FeatureId> FeatureVocab::find_local(std::size_t t, std::string_view value) const {
  const auto& index = index_.at(t);
  const auto it = index.find(std::string(value));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

FeatureId FeatureVocab::lookup(std::size_t t, std::string_view value) const {
  const auto local = find_local(t, value);
  return offsets_[t] + local.value_or(kUnkLocal);
}

std::uint64_t FeatureVocab::total_count(std::size_t t) const {
  const auto& c = counts_.at(t);
  return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

std::size_t FeatureVocab::template_of(FeatureId global) const {
  if (global >= total_size()) {
    throw std::out_of_range("feature id " + std::to_string(global) + " outside vocabulary of " +
                            std::to_string(total_size()));
  }
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

FeatureId FeatureVocab::add(std::size_t t, std::string_view value, std::uint64_t count) {
  if (value.empty()) throw std::invalid_argument("empty feature value");
  auto& index = index_.at(t);
  const auto [it, inserted] =
      index.try_emplace(std::string(value), static_cast<FeatureId>(values_[t].size()));
  if (inserted) {
    values_[t].emplace_back(value);
    counts_[t].push_back(0);
    for (std::size_t u = t + 1; u < offsets_.size(); ++u) ++offsets_[u];
  }
  counts_[t][it->second] += count;
  return it->second;
}

void FeatureVocab::write(std::ostream& out) const {
  out << "# fema vocab v1\n";
  for (std::size_t t = 0; t < names_.size(); ++t) {
    for (std::size_t j = 0; j < values_[t].size(); ++j) {
      out << names_[t] << '\t' << values_[t][j] << '\t' << counts_[t][j] << '\n';
    }
  }
}

FeatureVocab FeatureVocab::read(std::istream& in) {
  FeatureVocab vocab;
  vocab.values_.clear();
  vocab.counts_.clear();
  vocab.index_.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, '\t');
    const auto bad = [&](const std::string& why) {
      return DataError("vocabulary line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 3) throw bad("expected 3 tab-separated fields");
    const auto count = detail::parse_uint(fields[2]);
    if (!count) throw bad("bad count");
    if (fields[1].empty()) {
      // UNK opens a new template.
      vocab.names_.emplace_back(fields[0]);
      vocab.values_.push_back({std::string()});
      vocab.counts_.push_back({*count});
      vocab.index_.emplace_back();
      continue;
    }
    if (vocab.names_.empty() || vocab.names_.back() != fields[0]) {
      throw bad("feature before its template's UNK entry");
    }
    const std::size_t t = vocab.names_.size() - 1;
    if (!vocab.index_[t].try_emplace(std::string(fields[1]), vocab.values_[t].size()).second) {
      throw bad("duplicate feature");
    }
    vocab.values_[t].emplace_back(fields[1]);
    vocab.counts_[t].push_back(*count);
  }
  vocab.rebuild_offsets();
  return vocab;
}

void FeatureVocab::save(const std::string& path) const {
  detail::AtomicOutput file(path);
  write(file.stream());
  file.commit();
}

FeatureVocab FeatureVocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path);
  try {
    return read(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

namespace {
std::vector<std::string> names_of(const TemplateSet& schema) {
  std::vector<std::string> names;
  for (const auto& d : schema.templates()) names.push_back(d.name);
  return names;
}
}  // namespace

VocabBuilder::VocabBuilder(const TemplateSet& schema) : schema_(schema), raw_(names_of(schema)) {}

void VocabBuilder::add(const FeatureValues& values) {
  if (values.size() != schema_.size()) {
    throw std::invalid_argument("extraction size does not match schema");
  }
  for (std::size_t t = 0; t < values.size(); ++t) raw_.add(t, values[t], 1);
  ++num_instances_;
}

void VocabBuilder::add_sentence(const Sentence& sentence) {
  for (std::size_t i = 0; i < sentence.size(); ++i) add(extract(sentence, i, schema_));
}

FeatureVocab VocabBuilder::finish(std::uint64_t min_count) const {
  if (min_count == 0) throw ConfigError("min_count must be positive");
  if (num_instances_ == 0) throw DataError("no instances");
  FeatureVocab vocab(names_of(schema_));
  for (std::size_t t = 0; t < raw_.num_templates(); ++t) {
    vocab.add_unk_count(t, raw_.count(t, FeatureVocab::kUnkLocal));
    for (FeatureId j = 1; j < raw_.size(t); ++j) {
      const auto c = raw_.count(t, j);
      if (c >= min_count) {
        vocab.add(t, raw_.value(t, j), c);
      } else {
        vocab.add_unk_count(t, c);
      }
    }
  }
  return vocab;
}

FeatureVocab build_vocab(std::span<const FeatureValues> instances, const TemplateSet& schema,
                         std::uint64_t min_count) {
  VocabBuilder builder(schema);
  for (const auto& values : instances) builder.add(values);
  return builder.finish(min_count);
}

FeatureVocab build_vocab(std::span<const Sentence> sentences, const TemplateSet& schema,
                         std::uint64_t min_count) {
  VocabBuilder builder(schema);
  for (const auto& s : sentences) builder.add_sentence(s);
  return builder.finish(min_count);
}

}  // namespace fema
