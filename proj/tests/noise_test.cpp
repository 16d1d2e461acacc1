#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fema/errors.hpp"
#include "fema/noise.hpp"
#include "fema/vocab.hpp"
#include "oracles.hpp"

using namespace fema;

namespace {

FeatureVocab vocab_with_counts(const std::vector<std::vector<std::uint64_t>>& counts) {
  std::vector<std::string> names;
  for (std::size_t t = 0; t < counts.size(); ++t) names.push_back("t" + std::to_string(t));
  FeatureVocab vocab(names);
  for (std::size_t t = 0; t < counts.size(); ++t) {
    vocab.add_unk_count(t, counts[t][0]);
    for (std::size_t j = 1; j < counts[t].size(); ++j)
      vocab.add(t, "v" + std::to_string(j), counts[t][j]);
  }
  return vocab;
}

}  // namespace

TEST_CASE("alias table rejects invalid weights") {
  CHECK_THROWS_AS(AliasTable(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("alias table never draws zero-weight entries") {
  const std::vector<double> w{0.0, 3.0, 0.0, 1.0};
  AliasTable table(w);
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const auto s = table.sample(rng);
    CHECK((s == 1 || s == 3));
  }
}

TEST_CASE("empirical frequencies match counts over 1e6 draws") {
  const std::vector<std::uint64_t> counts{5, 1, 10, 3, 30, 1, 50};
  const auto vocab = vocab_with_counts({counts});
  const std::vector<std::size_t> templates{0};
  NoiseTable noise(vocab, templates);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);

  Rng rng(42);
  const std::size_t draws = 1000000;
  std::vector<std::size_t> observed(counts.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto id = noise.sample(0, rng);
    REQUIRE(vocab.template_of(id) == 0);
    ++observed[vocab.local_of(id)];
  }
  std::vector<double> expected;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double p = static_cast<double>(counts[j]) / total;
    expected.push_back(p);
    CHECK(noise.probability(0, static_cast<FeatureId>(j)) == doctest::Approx(p).epsilon(1e-12));
    CHECK(std::abs(static_cast<double>(observed[j]) / draws - p) <= 0.005);
  }
  CHECK(oracle::chi_square_p_value(observed, expected) > 0.001);
}

TEST_CASE("noise tables are per template and return global ids") {
  const auto vocab = vocab_with_counts({{0, 4, 4}, {1, 0, 0, 7}, {2}});
  const std::vector<std::size_t> templates{0, 1};
  NoiseTable noise(vocab, templates);
  CHECK(noise.has(0));
  CHECK(noise.has(1));
  CHECK_FALSE(noise.has(2));
  Rng rng(9);
  CHECK_THROWS_AS(noise.sample(2, rng), DataError);
  for (int i = 0; i < 1000; ++i) {
    const auto a = noise.sample(0, rng);
    CHECK(vocab.template_of(a) == 0);
    CHECK(vocab.local_of(a) != 0);
    const auto b = noise.sample(1, rng);
    CHECK((b == vocab.offset(1) || b == vocab.offset(1) + 3));
  }
}

TEST_CASE("zero-mass template is a data error") {
  const auto vocab = vocab_with_counts({{0, 0}});
  const std::vector<std::size_t> templates{0};
  CHECK_THROWS_AS(NoiseTable(vocab, templates), DataError);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  const auto vocab = vocab_with_counts({{1, 2, 3, 4, 5}});
  const std::vector<std::size_t> templates{0};
  NoiseTable noise(vocab, templates);
  Rng a(77), b(77);
  for (int i = 0; i < 1000; ++i) CHECK(noise.sample(0, a) == noise.sample(0, b));
}
