#include "fema/features.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "fema/errors.hpp"
#include "fema/vocab.hpp"
#include "text_util.hpp"

namespace fema {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Byte offset just past the first `n` code points.
std::size_t utf8_prefix_bytes(std::string_view s, std::size_t n) {
  std::size_t i = 0;
  while (i < s.size() && n > 0) {
    ++i;
    while (i < s.size() && is_continuation(static_cast<unsigned char>(s[i]))) ++i;
    --n;
  }
  return i;
}

std::size_t utf8_suffix_start(std::string_view s, std::size_t n) {
  std::size_t i = s.size();
  while (i > 0 && n > 0) {
    --i;
    while (i > 0 && is_continuation(static_cast<unsigned char>(s[i]))) --i;
    --n;
  }
  return i;
}

bool holds(std::string_view token, Predicate p) {
  for (const char ch : token) {
    const auto c = static_cast<unsigned char>(ch);
    switch (p) {
      case Predicate::kContainsDigit:
        if (c >= '0' && c <= '9') return true;
        break;
      case Predicate::kContainsUppercase:
        if (c >= 'A' && c <= 'Z') return true;
        break;
      case Predicate::kContainsHyphen:
        if (c == '-') return true;
        break;
    }
  }
  return false;
}

std::string_view lexical_value(const std::vector<std::string>& tokens, std::size_t position,
                               int offset) {
  const auto j = static_cast<long long>(position) + offset;
  if (j < 0) return j == -1 ? kBos : kBos2;
  if (j >= static_cast<long long>(tokens.size())) {
    return j == static_cast<long long>(tokens.size()) ? kEos : kEos2;
  }
  return tokens[static_cast<std::size_t>(j)];
}

std::string_view kind_name(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kLexical: return "lexical";
    case TemplateKind::kPrefix: return "prefix";
    case TemplateKind::kSuffix: return "suffix";
    case TemplateKind::kBinary: return "binary";
  }
  return "?";
}

std::string_view predicate_name(Predicate p) {
  switch (p) {
    case Predicate::kContainsDigit: return "contains-digit";
    case Predicate::kContainsUppercase: return "contains-uppercase";
    case Predicate::kContainsHyphen: return "contains-hyphen";
  }
  return "?";
}

}  // namespace

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (const char c : s) {
    if (!is_continuation(static_cast<unsigned char>(c))) ++n;
  }
  return n;
}

TemplateSet::TemplateSet(std::vector<TemplateDescriptor> templates)
    : templates_(std::move(templates)) {
  std::unordered_set<std::string> names;
  for (std::size_t t = 0; t < templates_.size(); ++t) {
    const auto& d = templates_[t];
    if (d.name.empty() || d.name.find('=') != std::string::npos ||
        detail::split_whitespace(d.name).size() != 1) {
      throw ConfigError("invalid template name '" + d.name + "'");
    }
    if (!names.insert(d.name).second) throw ConfigError("duplicate template name '" + d.name + "'");
    if (d.kind == TemplateKind::kLexical && (d.offset < -2 || d.offset > 2)) {
      throw ConfigError("lexical offset out of range in template " + d.name);
    }
    if ((d.kind == TemplateKind::kPrefix || d.kind == TemplateKind::kSuffix) &&
        (d.length < 1 || d.length > 4)) {
      throw ConfigError("affix length out of range in template " + d.name);
    }
    if (d.embedded) embedded_.push_back(t);
  }
}

std::optional<std::size_t> TemplateSet::find(std::string_view name) const {
  for (std::size_t t = 0; t < templates_.size(); ++t) {
    if (templates_[t].name == name) return t;
  }
  return std::nullopt;
}

void TemplateSet::write_manifest(std::ostream& out) const {
  out << "# fema templates v1\n";
  for (const auto& d : templates_) {
    out << d.name << ' ' << kind_name(d.kind) << ' ';
    switch (d.kind) {
      case TemplateKind::kLexical: out << d.offset; break;
      case TemplateKind::kPrefix:
      case TemplateKind::kSuffix: out << d.length; break;
      case TemplateKind::kBinary: out << predicate_name(d.predicate); break;
    }
    out << ' ' << (d.embedded ? 1 : 0) << '\n';
  }
}

TemplateSet TemplateSet::read_manifest(std::istream& in) {
  std::vector<TemplateDescriptor> templates;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_whitespace(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    const auto bad = [&](const std::string& why) {
      return DataError("template manifest line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) throw bad("expected 4 fields");
    TemplateDescriptor d;
    d.name = std::string(fields[0]);
    if (fields[3] != "0" && fields[3] != "1") throw bad("embedded flag must be 0 or 1");
    d.embedded = fields[3] == "1";
    const std::string param(fields[2]);
    try {
      if (fields[1] == "lexical") {
        d.kind = TemplateKind::kLexical;
        d.offset = std::stoi(param);
      } else if (fields[1] == "prefix" || fields[1] == "suffix") {
        d.kind = fields[1] == "prefix" ? TemplateKind::kPrefix : TemplateKind::kSuffix;
        d.length = std::stoi(param);
      } else if (fields[1] == "binary") {
        d.kind = TemplateKind::kBinary;
        if (param == "contains-digit") d.predicate = Predicate::kContainsDigit;
        else if (param == "contains-uppercase") d.predicate = Predicate::kContainsUppercase;
        else if (param == "contains-hyphen") d.predicate = Predicate::kContainsHyphen;
        else throw bad("unknown predicate " + param);
      } else {
        throw bad("unknown template kind " + std::string(fields[1]));
      }
    } catch (const std::logic_error&) {
      throw bad("bad parameter " + param);
    }
    templates.push_back(std::move(d));
  }
  try {
    return TemplateSet(std::move(templates));
  } catch (const ConfigError& e) {
    throw DataError(std::string("template manifest: ") + e.what());
  }
}

void TemplateSet::save(const std::string& path) const {
  detail::AtomicOutput file(path);
  write_manifest(file.stream());
  file.commit();
}

TemplateSet TemplateSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open template manifest " + path);
  return read_manifest(in);
}

TemplateSet default_template_set() {
  std::vector<TemplateDescriptor> t;
  for (int o = -2; o <= 2; ++o) {
    TemplateDescriptor d;
    d.name = o == 0 ? "w0" : (o < 0 ? "w" + std::to_string(o) : "w+" + std::to_string(o));
    d.kind = TemplateKind::kLexical;
    d.offset = o;
    d.embedded = true;
    t.push_back(d);
  }
  for (const auto kind : {TemplateKind::kPrefix, TemplateKind::kSuffix}) {
    for (int k = 1; k <= 4; ++k) {
      TemplateDescriptor d;
      d.name = (kind == TemplateKind::kPrefix ? "pre" : "suf") + std::to_string(k);
      d.kind = kind;
      d.length = k;
      d.embedded = true;
      t.push_back(d);
    }
  }
  const std::pair<const char*, Predicate> binaries[] = {
      {"hasdigit", Predicate::kContainsDigit},
      {"hasupper", Predicate::kContainsUppercase},
      {"hashyphen", Predicate::kContainsHyphen},
  };
  for (const auto& [name, p] : binaries) {
    TemplateDescriptor d;
    d.name = name;
    d.kind = TemplateKind::kBinary;
    d.predicate = p;
    t.push_back(d);
  }
  return TemplateSet(std::move(t));
}

FeatureValues extract(const std::vector<std::string>& tokens, std::size_t position,
                      const TemplateSet& schema) {
  if (position >= tokens.size()) {
    throw std::out_of_range("position " + std::to_string(position) +
                            " outside sentence of length " + std::to_string(tokens.size()));
  }
  const std::string& token = tokens[position];
  FeatureValues values;
  values.reserve(schema.size());
  for (const auto& d : schema.templates()) {
    switch (d.kind) {
      case TemplateKind::kLexical:
        values.emplace_back(lexical_value(tokens, position, d.offset));
        break;
      case TemplateKind::kPrefix:
      case TemplateKind::kSuffix: {
        const auto k = static_cast<std::size_t>(d.length);
        if (utf8_length(token) < k) {
          values.push_back(token + std::string(kShortMarker));
        } else if (d.kind == TemplateKind::kPrefix) {
          values.push_back(token.substr(0, utf8_prefix_bytes(token, k)));
        } else {
          values.push_back(token.substr(utf8_suffix_start(token, k)));
        }
        break;
      }
      case TemplateKind::kBinary:
        values.emplace_back(holds(token, d.predicate) ? "true" : "false");
        break;
    }
  }
  return values;
}

FeatureValues extract(const Sentence& sentence, std::size_t position, const TemplateSet& schema) {
  return extract(sentence.tokens, position, schema);
}

std::string feature_string(const TemplateSet& schema, std::size_t t, std::string_view value) {
  std::string out = schema[t].name;
  out += '=';
  out += value;
  return out;
}

Instance encode(const FeatureValues& values, const FeatureVocab& vocab) {
  if (values.size() != vocab.num_templates()) {
    throw std::invalid_argument("extraction has " + std::to_string(values.size()) +
                                " values, vocabulary has " +
                                std::to_string(vocab.num_templates()) + " templates");
  }
  Instance instance;
  instance.active.reserve(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) instance.active.push_back(vocab.lookup(t, values[t]));
  return instance;
}

}  // namespace fema
