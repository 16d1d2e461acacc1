#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fema/corpus.hpp"

namespace fema {

// Desk-scale domain-shift corpora generated from a small tag grammar.
struct ShiftBenchmark {
  std::vector<TaggedSentence> source_train;
  std::vector<TaggedSentence> target_dev;
  std::vector<TaggedSentence> target_test;
  std::vector<Sentence> source_unlabeled;
  std::vector<Sentence> target_unlabeled;
};

struct ShiftBenchmarkOptions {
  std::size_t size = 2000;          // source_train, and each unlabeled corpus
  std::size_t eval_size = 0;        // target_dev / target_test; 0 -> size / 4
  double swap_fraction = 0.7;       // open-class words replaced in the target lexicon
  std::size_t words_per_tag = 60;   // open-class lexicon size per tag
};

// Throws ConfigError if size < 100. Same seed and options -> identical corpora.
ShiftBenchmark make_shift_benchmark(std::uint64_t seed, std::size_t size);
ShiftBenchmark make_shift_benchmark(std::uint64_t seed, const ShiftBenchmarkOptions& options);

// Fraction of tokens in `target` whose surface form never occurs in `source`.
double oov_rate(std::span<const TaggedSentence> target, std::span<const TaggedSentence> source);

struct BenchmarkFiles {
  std::string source_train;
  std::string source_unlabeled;
  std::string target_unlabeled;
  std::string target_dev;
  std::string target_test;
};

// Writes the five corpora under `dir` (created if missing).
BenchmarkFiles write_benchmark(const ShiftBenchmark& bench, const std::string& dir);

}  // namespace fema
