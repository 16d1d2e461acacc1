#include <random>
#include <sstream>

#include "doctest.h"
#include "fema/errors.hpp"
#include "fema/vocab.hpp"

using namespace fema;

namespace {

TemplateSet single_template() {
  TemplateDescriptor d;
  d.name = "w0";
  d.embedded = true;
  return TemplateSet({d});
}

std::vector<FeatureValues> w0_values(std::initializer_list<const char*> values) {
  std::vector<FeatureValues> out;
  for (const auto* v : values) out.push_back({v});
  return out;
}

}  // namespace

TEST_CASE("build_vocab counts features per template") {
  const auto schema = single_template();
  const auto vocab = build_vocab(w0_values({"a", "a", "b"}), schema, 1);
  REQUIRE(vocab.size(0) == 3);  // UNK, a, b
  CHECK(vocab.value(0, 1) == "a");
  CHECK(vocab.count(0, 1) == 2);
  CHECK(vocab.value(0, 2) == "b");
  CHECK(vocab.count(0, 2) == 1);
  CHECK(vocab.count(0, FeatureVocab::kUnkLocal) == 0);
}

TEST_CASE("min_count folds rare features into UNK") {
  const auto vocab = build_vocab(w0_values({"a", "a", "b"}), single_template(), 2);
  REQUIRE(vocab.size(0) == 2);
  CHECK(vocab.value(0, 1) == "a");
  CHECK(vocab.count(0, 1) == 2);
  CHECK(vocab.count(0, FeatureVocab::kUnkLocal) == 1);
  CHECK(vocab.lookup(0, "b") == vocab.unk(0));
}

TEST_CASE("count mass per template equals the number of instances") {
  const auto schema = default_template_set();
  const std::vector<Sentence> corpus = {{{"the", "new", "house"}}};
  for (const std::uint64_t min_count : {1, 2, 5}) {
    const auto vocab = build_vocab(std::span<const Sentence>(corpus), schema, min_count);
    for (std::size_t t = 0; t < schema.size(); ++t) CHECK(vocab.total_count(t) == 3);
  }
}

TEST_CASE("empty instance stream is an error") {
  CHECK_THROWS_WITH_AS(build_vocab(std::span<const FeatureValues>(), single_template(), 1),
                       "no instances", DataError);
}

TEST_CASE("ids follow first occurrence and are deterministic") {
  const auto a = build_vocab(w0_values({"z", "y", "z", "x"}), single_template(), 1);
  const auto b = build_vocab(w0_values({"z", "y", "z", "x"}), single_template(), 1);
  CHECK(a == b);
  CHECK(a.value(0, 1) == "z");
  CHECK(a.value(0, 2) == "y");
  CHECK(a.value(0, 3) == "x");
}

TEST_CASE("global id space is a bijection over (template, local id)") {
  std::mt19937_64 rng(3);
  const auto schema = default_template_set();
  std::vector<Sentence> corpus;
  for (int s = 0; s < 30; ++s) {
    Sentence sentence;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) sentence.tokens.push_back("w" + std::to_string(rng() % 40));
    corpus.push_back(sentence);
  }
  const auto vocab = build_vocab(std::span<const Sentence>(corpus), schema, 2);
  FeatureId expected = 0;
  for (std::size_t t = 0; t < vocab.num_templates(); ++t) {
    CHECK(vocab.offset(t) == expected);
    for (FeatureId j = 0; j < vocab.size(t); ++j, ++expected) {
      CHECK(vocab.template_of(expected) == t);
      CHECK(vocab.local_of(expected) == j);
      if (j != FeatureVocab::kUnkLocal) {
        CHECK(vocab.count(t, j) >= 2);
        CHECK(vocab.lookup(t, vocab.value(t, j)) == expected);
      }
    }
  }
  CHECK(expected == vocab.total_size());
  CHECK_THROWS_AS(vocab.template_of(static_cast<FeatureId>(vocab.total_size())), std::out_of_range);
}

TEST_CASE("encode maps known strings to ids and unknown strings to UNK") {
  const auto schema = default_template_set();
  const std::vector<Sentence> corpus = {{{"the", "new", "house"}}};
  const auto vocab = build_vocab(std::span<const Sentence>(corpus), schema, 1);
  const auto values = extract(corpus[0], 1, schema);
  const auto inst = encode(values, vocab);
  REQUIRE(inst.active.size() == schema.size());
  for (std::size_t t = 0; t < schema.size(); ++t) {
    CHECK(inst.active[t] == vocab.lookup(t, values[t]));
    CHECK(inst.active[t] != vocab.unk(t));
  }
  const auto unseen = encode(extract(Sentence{{"zebra"}}, 0, schema), vocab);
  CHECK(unseen.active[*schema.find("w0")] == vocab.unk(*schema.find("w0")));
  CHECK(unseen.active.size() == 16);
  CHECK_THROWS_AS(encode(FeatureValues{"a"}, vocab), std::invalid_argument);
}

TEST_CASE("vocabulary text form round-trips") {
  const auto schema = default_template_set();
  const std::vector<Sentence> corpus = {{{"the", "new", "house"}}, {{"a", "new", "car"}}};
  const auto vocab = build_vocab(std::span<const Sentence>(corpus), schema, 1);
  std::stringstream ss;
  vocab.write(ss);
  CHECK(FeatureVocab::read(ss) == vocab);

  std::stringstream bad("w0\tx\t1\n");
  CHECK_THROWS_AS(FeatureVocab::read(bad), DataError);
}
