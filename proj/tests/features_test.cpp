#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fema/errors.hpp"
#include "fema/features.hpp"
#include "fema/vocab.hpp"

using namespace fema;

namespace {

std::string value_of(const Sentence& s, std::size_t pos, const char* name) {
  const auto schema = default_template_set();
  return extract(s, pos, schema)[*schema.find(name)];
}

}  // namespace

TEST_CASE("default schema: 16 templates, 13 embedded") {
  const auto schema = default_template_set();
  CHECK(schema.size() == 16);
  CHECK(schema.num_embedded() == 13);
  std::set<std::string> names;
  int binaries = 0;
  for (const auto& d : schema.templates()) {
    names.insert(d.name);
    if (d.kind == TemplateKind::kBinary) {
      ++binaries;
      CHECK_FALSE(d.embedded);
    } else {
      CHECK(d.embedded);
    }
  }
  CHECK(binaries == 3);
  CHECK(names.size() == 16);
}

TEST_CASE("lexical templates read neighbouring tokens") {
  const Sentence s{{"the", "new", "house"}};
  CHECK(value_of(s, 2, "w-1") == "new");
  CHECK(value_of(s, 2, "w-2") == "the");
  CHECK(value_of(s, 2, "w0") == "house");
  CHECK(value_of(s, 2, "w+1") == "</s>");
  CHECK(value_of(s, 2, "w+2") == "</s2>");
  CHECK(value_of(s, 0, "w-1") == "<s>");
}

TEST_CASE("boundary sentinels on a one-token sentence") {
  const Sentence s{{"the"}};
  CHECK(value_of(s, 0, "w-2") == "<s2>");
  CHECK(value_of(s, 0, "w-1") == "<s>");
  CHECK(value_of(s, 0, "w+1") == "</s>");
  CHECK(value_of(s, 0, "w+2") == "</s2>");
}

TEST_CASE("affixes and the short-word marker") {
  const Sentence s{{"new"}};
  CHECK(value_of(s, 0, "pre4") == "new#SHORT");
  CHECK(value_of(s, 0, "suf4") == "new#SHORT");
  CHECK(value_of(s, 0, "pre3") == "new");
  CHECK(value_of(s, 0, "suf2") == "ew");
  CHECK(value_of(s, 0, "pre1") == "n");
}

TEST_CASE("affixes count UTF-8 code points") {
  const Sentence s{{"caf\xc3\xa9"}};
  CHECK(value_of(s, 0, "suf1") == "\xc3\xa9");
  CHECK(value_of(s, 0, "pre4") == "caf\xc3\xa9");
  CHECK(value_of(s, 0, "suf4") == "caf\xc3\xa9");
}

TEST_CASE("binary predicates") {
  const Sentence s{{"Mid-1990s", "house"}};
  CHECK(value_of(s, 0, "hasdigit") == "true");
  CHECK(value_of(s, 0, "hasupper") == "true");
  CHECK(value_of(s, 0, "hashyphen") == "true");
  CHECK(value_of(s, 1, "hasdigit") == "false");
  CHECK(value_of(s, 1, "hasupper") == "false");
  CHECK(value_of(s, 1, "hashyphen") == "false");
}

TEST_CASE("position out of range throws") {
  CHECK_THROWS_AS(extract(Sentence{{"a"}}, 1, default_template_set()), std::out_of_range);
}

TEST_CASE("feature strings are namespaced by template") {
  const auto schema = default_template_set();
  CHECK(feature_string(schema, *schema.find("w-1"), "new") == "w-1=new");
  CHECK(feature_string(schema, *schema.find("suf2"), "ew") == "suf2=ew");
}

TEST_CASE("property: short marker iff k exceeds token length; extraction is pure and total") {
  std::mt19937_64 rng(11);
  const auto schema = default_template_set();
  const std::vector<std::string> pieces = {"a", "B", "7", "-", "\xc3\xa9", "\xe4\xb8\xad", "xy"};
  std::vector<Sentence> corpus;
  for (int trial = 0; trial < 200; ++trial) {
    Sentence s;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      std::string tok;
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int c = 0; c < len; ++c) tok += pieces[rng() % pieces.size()];
      s.tokens.push_back(tok);
    }
    corpus.push_back(s);
  }
  const auto vocab = build_vocab(std::span<const Sentence>(corpus), schema, 1);
  for (const auto& s : corpus) {
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      const auto values = extract(s, pos, schema);
      REQUIRE(values.size() == schema.size());
      CHECK(values == extract(s, pos, schema));
      const auto len = utf8_length(s.tokens[pos]);
      for (std::size_t t = 0; t < schema.size(); ++t) {
        const auto& d = schema[t];
        if (d.kind != TemplateKind::kPrefix && d.kind != TemplateKind::kSuffix) continue;
        const bool marked = values[t] == s.tokens[pos] + "#SHORT";
        CHECK(marked == (static_cast<std::size_t>(d.length) > len));
        if (!marked) CHECK(utf8_length(values[t]) == static_cast<std::size_t>(d.length));
      }
      const auto inst = encode(values, vocab);
      REQUIRE(inst.active.size() == schema.size());
      for (std::size_t t = 0; t < schema.size(); ++t) {
        CHECK(inst.active[t] >= vocab.offset(t));
        CHECK(inst.active[t] < vocab.offset(t) + vocab.size(t));
      }
    }
  }
}

TEST_CASE("template manifest round-trips and rejects garbage") {
  const auto schema = default_template_set();
  std::stringstream ss;
  schema.write_manifest(ss);
  CHECK(TemplateSet::read_manifest(ss) == schema);

  std::stringstream bad("w0 lexical zero 1\n");
  CHECK_THROWS_AS(TemplateSet::read_manifest(bad), DataError);
  std::stringstream dup("a lexical 0 1\na prefix 2 1\n");
  CHECK_THROWS_AS(TemplateSet::read_manifest(dup), DataError);
  std::stringstream far("a lexical 3 1\n");
  CHECK_THROWS_AS(TemplateSet::read_manifest(far), DataError);
}
