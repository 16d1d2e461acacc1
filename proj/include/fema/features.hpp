#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fema/corpus.hpp"

namespace fema {

enum class TemplateKind { kLexical, kPrefix, kSuffix, kBinary };

enum class Predicate { kContainsDigit, kContainsUppercase, kContainsHyphen };

struct TemplateDescriptor {
  std::string name;
  TemplateKind kind = TemplateKind::kLexical;
  int offset = 0;         // kLexical: -2..+2
  int length = 1;         // kPrefix / kSuffix: 1..4 code points
  Predicate predicate{};  // kBinary
  bool embedded = false;

  bool operator==(const TemplateDescriptor&) const = default;
};

// Ordered template schema. Template order is the order of Instance::active
// and of the dense block of an augmented vector.
class TemplateSet {
 public:
  TemplateSet() = default;
  explicit TemplateSet(std::vector<TemplateDescriptor> templates);

  std::size_t size() const { return templates_.size(); }
  const TemplateDescriptor& operator[](std::size_t t) const { return templates_[t]; }
  const std::vector<TemplateDescriptor>& templates() const { return templates_; }

  // Template indices flagged embedded, in schema order.
  const std::vector<std::size_t>& embedded() const { return embedded_; }
  std::size_t num_embedded() const { return embedded_.size(); }
  std::optional<std::size_t> find(std::string_view name) const;

  // One descriptor per line: "name kind param embedded".
  void write_manifest(std::ostream& out) const;
  static TemplateSet read_manifest(std::istream& in);
  void save(const std::string& path) const;
  static TemplateSet load(const std::string& path);

  bool operator==(const TemplateSet& other) const { return templates_ == other.templates_; }

 private:
  std::vector<TemplateDescriptor> templates_;
  std::vector<std::size_t> embedded_;
};

// w-2 w-1 w0 w+1 w+2, pre1..pre4, suf1..suf4, hasdigit hasupper hashyphen.
TemplateSet default_template_set();

// Suffix appended to an affix value when the token is shorter than the affix.
inline constexpr std::string_view kShortMarker = "#SHORT";

// One value per template, in template order.
using FeatureValues = std::vector<std::string>;

// Fills every template at `position`. Throws std::out_of_range for a bad position.
FeatureValues extract(const Sentence& sentence, std::size_t position, const TemplateSet& schema);
FeatureValues extract(const std::vector<std::string>& tokens, std::size_t position,
                      const TemplateSet& schema);

// "templateName=value"
std::string feature_string(const TemplateSet& schema, std::size_t t, std::string_view value);

using FeatureId = std::uint32_t;

struct Instance {
  std::vector<FeatureId> active;  // global ids, one per template
  std::optional<std::size_t> tag;

  bool operator==(const Instance&) const = default;
};

class FeatureVocab;

// Unknown values map to the template's UNK id.
Instance encode(const FeatureValues& values, const FeatureVocab& vocab);

std::size_t utf8_length(std::string_view s);

}  // namespace fema
