#include "fema/benchmark.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <unordered_map>
#include <unordered_set>

#include "fema/errors.hpp"
#include "fema/noise.hpp"

namespace fema {

namespace {

// Open-class tags and the endings their word forms draw from. Endings
// overlap across tags so that affixes alone do not determine the tag.
enum Open { kNN, kNNS, kJJ, kVB, kVBZ, kVBD, kVBG, kRB, kCD, kNumOpen };

constexpr std::array<const char*, kNumOpen> kOpenTags = {"NN", "NNS", "JJ", "VB", "VBZ",
                                                         "VBD", "VBG", "RB", "CD"};

const std::vector<std::string> kNounEnds = {"er", "on", "ure", "al", "ent", "ing", "ic", "ate"};
const std::vector<std::string> kAdjEnds = {"al", "ive", "ic", "ent", "ed", "ing", "ous", "ate"};
const std::vector<std::string> kVerbEnds = {"ate", "er", "on", "ure", "ent", "ic", ""};

const std::vector<std::string> kOnsets = {"b", "br", "c", "d", "dr", "f", "g", "gl", "h", "j",
                                          "k", "l", "m", "n", "p", "pl", "qu", "r", "s", "sk",
                                          "st", "t", "tr", "v", "w", "z"};
const std::vector<std::string> kVowels = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
const std::vector<std::string> kCodas = {"", "n", "m", "r", "l", "st", "nd", "sp", "v", "t"};

struct Closed {
  const char* tag;
  std::vector<std::string> words;
};

const std::vector<Closed> kClosed = {
    {"DT", {"the", "a", "this", "every", "that", "some"}},
    {"IN", {"of", "in", "on", "with", "for", "from", "near"}},
    {"PRP", {"he", "she", "they", "it", "we"}},
    {"MD", {"will", "can", "may", "should"}},
    {"TO", {"to"}},
    {"CC", {"and", "or", "but"}},
    {".", {"."}},
};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[static_cast<std::size_t>(rng() % v.size())];
}

bool chance(double p, Rng& rng) { return uniform01(rng) < p; }

class Lexicon {
 public:
  // Word lists per open tag; index = frequency rank.
  std::array<std::vector<std::string>, kNumOpen> words;
  std::array<AliasTable, kNumOpen> freq;

  void build_tables() {
    for (int t = 0; t < kNumOpen; ++t) {
      std::vector<double> w(words[t].size());
      for (std::size_t r = 0; r < w.size(); ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), 0.9);
      freq[t] = AliasTable(w);
    }
  }

  const std::string& draw(int t, Rng& rng) const { return words[t][freq[t].sample(rng)]; }
};

// Pseudo-word stems unique across the benchmark.
class StemMaker {
 public:
  explicit StemMaker(Rng& rng) : rng_(rng) {
    for (const auto& c : kClosed) {
      for (const auto& w : c.words) used_.insert(w);
    }
  }

  std::string make() {
    while (true) {
      std::string s;
      const int syllables = 1 + static_cast<int>(rng_() % 2);
      for (int i = 0; i < syllables; ++i) s += pick(kOnsets, rng_) + pick(kVowels, rng_) + pick(kCodas, rng_);
      if (s.size() >= 3 && used_.insert(s).second) return s;
    }
  }

  void reserve(const std::string& w) { used_.insert(w); }
  bool taken(const std::string& w) const { return used_.count(w) != 0; }

 private:
  Rng& rng_;
  std::unordered_set<std::string> used_;
};

struct Entry {
  std::string stem;
  std::string end;
  bool hyphen = false;
};

// Verb paradigms share a stem across VB/VBZ/VBD/VBG; nouns across NN/NNS.
struct Paradigms {
  std::vector<Entry> nouns, adjectives, verbs, adverbs;
  std::vector<std::string> numbers;
};

Entry make_entry(StemMaker& stems, const std::vector<std::string>& ends, Rng& rng, double hyphen_p) {
  Entry e{stems.make(), pick(ends, rng), false};
  if (hyphen_p > 0 && chance(hyphen_p, rng)) {
    e.hyphen = true;
    e.stem = stems.make() + "-" + e.stem;
  }
  return e;
}

Lexicon realize(const Paradigms& p) {
  Lexicon lex;
  for (const auto& e : p.nouns) {
    lex.words[kNN].push_back(e.stem + e.end);
    lex.words[kNNS].push_back(e.stem + e.end + "s");
  }
  for (const auto& e : p.adjectives) lex.words[kJJ].push_back(e.stem + e.end);
  for (const auto& e : p.verbs) {
    lex.words[kVB].push_back(e.stem + e.end);
    lex.words[kVBZ].push_back(e.stem + e.end + "s");
    lex.words[kVBD].push_back(e.stem + e.end + "ed");
    lex.words[kVBG].push_back(e.stem + e.end + "ing");
  }
  for (const auto& e : p.adverbs) lex.words[kRB].push_back(e.stem + e.end + "ly");
  lex.words[kCD] = p.numbers;
  lex.build_tables();
  return lex;
}

// Replaces a fraction of each paradigm list (at the same frequency rank)
// with fresh stems that keep the original ending.
Paradigms swap(const Paradigms& src, double fraction, StemMaker& stems, Rng& rng) {
  Paradigms out = src;
  auto replace = [&](std::vector<Entry>& list) {
    for (auto& e : list) {
      if (!chance(fraction, rng)) continue;
      const auto dash = e.stem.find('-');
      e.stem = dash == std::string::npos ? stems.make() : stems.make() + "-" + stems.make();
    }
  };
  replace(out.nouns);
  replace(out.adjectives);
  replace(out.verbs);
  replace(out.adverbs);
  for (auto& n : out.numbers) {
    if (!chance(fraction, rng)) continue;
    std::string fresh;
    do {
      fresh = std::to_string(100 + rng() % 9900);
    } while (stems.taken(fresh));
    stems.reserve(fresh);
    n = fresh;
  }
  return out;
}

class Generator {
 public:
  Generator(const Lexicon& lex, Rng& rng) : lex_(lex), rng_(rng) {}

  TaggedSentence sentence() {
    out_ = TaggedSentence{};
    clause(0);
    if (chance(0.15, rng_)) {
      closed("CC");
      clause(1);
    }
    closed(".");
    return std::move(out_);
  }

 private:
  void open(int t) {
    out_.tokens.push_back(lex_.draw(t, rng_));
    out_.tags.emplace_back(kOpenTags[t]);
  }

  void closed(const char* tag) {
    for (const auto& c : kClosed) {
      if (std::string_view(c.tag) == tag) {
        out_.tokens.push_back(pick(c.words, rng_));
        out_.tags.emplace_back(tag);
        return;
      }
    }
  }

  void clause(int depth) {
    noun_phrase(depth);
    verb_phrase(depth);
  }

  void adjectives() {
    if (chance(0.1, rng_)) open(kRB);
    open(kJJ);
    if (chance(0.2, rng_)) open(kJJ);
  }

  void noun_phrase(int depth) {
    const double r = uniform01(rng_);
    if (r < 0.40) {
      closed("DT");
      open(kNN);
    } else if (r < 0.65) {
      closed("DT");
      adjectives();
      open(kNN);
    } else if (r < 0.75) {
      open(kNNS);
    } else if (r < 0.83) {
      adjectives();
      open(kNNS);
    } else if (r < 0.88) {
      open(kCD);
      open(kNNS);
    } else {
      closed("PRP");
      return;
    }
    if (depth < 2 && chance(0.15, rng_)) {
      closed("IN");
      noun_phrase(depth + 1);
    }
  }

  void verb_phrase(int depth) {
    const double r = uniform01(rng_);
    if (r < 0.25) {
      open(kVBZ);
      noun_phrase(depth + 1);
    } else if (r < 0.50) {
      open(kVBD);
      noun_phrase(depth + 1);
    } else if (r < 0.65) {
      closed("MD");
      open(kVB);
      noun_phrase(depth + 1);
    } else if (r < 0.72) {
      open(kVBD);
    } else if (r < 0.78) {
      open(kVBZ);
      open(kRB);
    } else if (r < 0.88) {
      open(kVBD);
      noun_phrase(depth + 1);
      closed("IN");
      noun_phrase(depth + 1);
    } else if (r < 0.94) {
      open(kVBZ);
      closed("TO");
      open(kVB);
      noun_phrase(depth + 1);
    } else {
      open(kVBD);
      open(kVBG);
      noun_phrase(depth + 1);
    }
  }

  const Lexicon& lex_;
  Rng& rng_;
  TaggedSentence out_;
};

std::vector<TaggedSentence> generate(const Lexicon& lex, std::size_t n, Rng& rng) {
  Generator gen(lex, rng);
  std::vector<TaggedSentence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gen.sentence());
  return out;
}

std::vector<Sentence> strip(std::vector<TaggedSentence> tagged) {
  std::vector<Sentence> out;
  out.reserve(tagged.size());
  for (auto& s : tagged) out.push_back(Sentence{std::move(s.tokens)});
  return out;
}

}  // namespace

ShiftBenchmark make_shift_benchmark(std::uint64_t seed, std::size_t size) {
  ShiftBenchmarkOptions options;
  options.size = size;
  return make_shift_benchmark(seed, options);
}

ShiftBenchmark make_shift_benchmark(std::uint64_t seed, const ShiftBenchmarkOptions& options) {
  if (options.size < 100) throw ConfigError("benchmark size must be at least 100 sentences");
  if (!(options.swap_fraction >= 0 && options.swap_fraction <= 1)) {
    throw ConfigError("swap fraction must lie in [0, 1]");
  }
  if (options.words_per_tag < 2) throw ConfigError("need at least 2 words per tag");
  Rng rng(seed);
  StemMaker stems(rng);

  Paradigms source;
  const std::size_t n = options.words_per_tag;
  for (std::size_t i = 0; i < n; ++i) {
    source.nouns.push_back(make_entry(stems, kNounEnds, rng, 0.0));
    source.adjectives.push_back(make_entry(stems, kAdjEnds, rng, 0.1));
    source.verbs.push_back(make_entry(stems, kVerbEnds, rng, 0.0));
    source.adverbs.push_back(make_entry(stems, kAdjEnds, rng, 0.0));
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    std::string num;
    do {
      num = std::to_string(100 + rng() % 9900);
    } while (stems.taken(num));
    stems.reserve(num);
    source.numbers.push_back(num);
  }
  const Paradigms target = swap(source, options.swap_fraction, stems, rng);
  const Lexicon source_lex = realize(source);
  const Lexicon target_lex = realize(target);

  const std::size_t eval = options.eval_size ? options.eval_size : std::max<std::size_t>(options.size / 4, 25);
  ShiftBenchmark bench;
  bench.source_train = generate(source_lex, options.size, rng);
  bench.source_unlabeled = strip(generate(source_lex, options.size, rng));
  bench.target_unlabeled = strip(generate(target_lex, options.size, rng));
  bench.target_dev = generate(target_lex, eval, rng);
  bench.target_test = generate(target_lex, eval, rng);
  return bench;
}

double oov_rate(std::span<const TaggedSentence> target, std::span<const TaggedSentence> source) {
  std::unordered_set<std::string> known;
  for (const auto& s : source) known.insert(s.tokens.begin(), s.tokens.end());
  std::size_t total = 0, oov = 0;
  for (const auto& s : target) {
    for (const auto& w : s.tokens) {
      ++total;
      oov += known.count(w) == 0;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(oov) / static_cast<double>(total);
}

BenchmarkFiles write_benchmark(const ShiftBenchmark& bench, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = dir.empty() || dir.back() == '/' ? dir : dir + "/";
  BenchmarkFiles files{base + "source.train.tagged", base + "source.unlabeled.txt",
                       base + "target.unlabeled.txt", base + "target.dev.tagged",
                       base + "target.test.tagged"};
  write_tagged_corpus(files.source_train, bench.source_train);
  write_plain_corpus(files.source_unlabeled, bench.source_unlabeled);
  write_plain_corpus(files.target_unlabeled, bench.target_unlabeled);
  write_tagged_corpus(files.target_dev, bench.target_dev);
  write_tagged_corpus(files.target_test, bench.target_test);
  return files;
}

}  // namespace fema
