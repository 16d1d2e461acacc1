#pragma once

// Synthetic co-occurrence data with a known pairing: instance n activates
// a_i in template "a" and b_i in template "b" for a random i.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fema/embedding.hpp"
#include "fema/features.hpp"
#include "fema/vocab.hpp"
#include "oracles.hpp"

namespace fema::testing {

struct Planted {
  TemplateSet schema;
  FeatureVocab vocab;
  std::vector<Instance> instances;
  std::size_t pairs = 0;
};

inline TemplateSet two_template_schema() {
  TemplateDescriptor a{.name = "a", .kind = TemplateKind::kLexical, .offset = 0, .embedded = true};
  TemplateDescriptor b{.name = "b", .kind = TemplateKind::kLexical, .offset = 1, .embedded = true};
  return TemplateSet({a, b});
}

inline Planted make_planted(std::size_t pairs, std::size_t count, std::uint64_t seed) {
  Planted p;
  p.pairs = pairs;
  p.schema = two_template_schema();
  p.vocab = FeatureVocab({"a", "b"});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pairs - 1);
  std::vector<std::string> drawn(count);
  for (auto& i : drawn) {
    i = std::to_string(pick(rng));
    p.vocab.add(0, "a" + i, 1);
    p.vocab.add(1, "b" + i, 1);
  }
  for (const auto& i : drawn) {
    p.instances.push_back(Instance{{p.vocab.lookup(0, "a" + i), p.vocab.lookup(1, "b" + i)}, {}});
  }
  return p;
}

// Number of a_i whose highest-cosine output vector among the b_j is b_i.
inline std::size_t recovered_pairs(const EmbeddingModel& model, const Planted& p) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.pairs; ++i) {
    const auto u = model.input_row(p.vocab.lookup(0, "a" + std::to_string(i)));
    std::size_t best = 0;
    long double best_score = -1e300L;
    for (std::size_t j = 0; j < p.pairs; ++j) {
      const auto v = model.output_row(p.vocab.lookup(1, "b" + std::to_string(j)));
      const auto s = oracle::dot(u, v) / std::sqrt(oracle::dot(u, u) * oracle::dot(v, v));
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    if (best == i) ++hits;
  }
  return hits;
}

// Instance objective with the noise expectation enumerated exactly over
// each template's unigram distribution.
inline long double exact_objective(const EmbeddingModel& model, const Instance& inst, std::size_t k) {
  const auto& vocab = model.vocab();
  const auto& embedded = model.schema().embedded();
  long double total = 0;
  for (const auto t : embedded) {
    const auto u = model.input_row(inst.active[t]);
    for (const auto tp : embedded) {
      if (tp == t) continue;
      total += oracle::log_sigmoid(oracle::dot(u, model.output_row(inst.active[tp])));
      long double mass = 0, expected = 0;
      for (FeatureId j = 0; j < vocab.size(tp); ++j) {
        const long double c = static_cast<long double>(vocab.count(tp, j));
        mass += c;
        expected += c * oracle::log_sigmoid(-oracle::dot(u, model.output_row(vocab.offset(tp) + j)));
      }
      total += static_cast<long double>(k) * expected / mass;
    }
  }
  return total / static_cast<long double>(embedded.size());
}

}  // namespace fema::testing
