#include <filesystem>
#include <set>

#include "doctest.h"
#include "fema/benchmark.hpp"
#include "fema/errors.hpp"
#include "fema/experiment.hpp"
#include "test_util.hpp"

using namespace fema;
using fema::testing::read_file;
using fema::testing::TempDir;
using fema::testing::write_file;

namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_without(const std::string& text, const std::string& prefix) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) != 0) out.push_back(line);
  return out;
}

ExperimentConfig small_config(const BenchmarkFiles& files, Mode mode) {
  ExperimentConfig c;
  c.source_train = files.source_train;
  c.source_unlabeled = files.source_unlabeled;
  c.targets = {{"tgt", files.target_unlabeled, files.target_dev, files.target_test}};
  c.mode = mode;
  c.embedding.dim = 8;
  c.embedding.epochs = 1;
  c.tagger.epochs = 3;
  return c;
}

}  // namespace

TEST_CASE("benchmark has a real vocabulary shift and is deterministic") {
  const auto a = make_shift_benchmark(1, 400);
  CHECK(a.source_train.size() == 400);
  CHECK(a.source_unlabeled.size() == 400);
  CHECK(a.target_unlabeled.size() == 400);
  CHECK(a.target_dev.size() == 100);
  CHECK(a.target_test.size() == 100);
  CHECK(oov_rate(a.target_test, a.source_train) >= 0.30);
  CHECK(oov_rate(a.source_train, a.source_train) == 0.0);
  const auto b = make_shift_benchmark(1, 400);
  CHECK(a.source_train == b.source_train);
  CHECK(a.target_test == b.target_test);
  CHECK_FALSE(make_shift_benchmark(2, 400).source_train == a.source_train);
  CHECK_THROWS_AS(make_shift_benchmark(1, 50), ConfigError);
}

TEST_CASE("written benchmark files parse back") {
  const auto bench = make_shift_benchmark(3, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  CHECK(read_tagged_corpus(files.source_train) == bench.source_train);
  CHECK(read_tagged_corpus(files.target_dev) == bench.target_dev);
  CHECK(read_tagged_corpus(files.target_test) == bench.target_test);
  CHECK(read_plain_corpus(files.source_unlabeled) == bench.source_unlabeled);
  CHECK(read_plain_corpus(files.target_unlabeled) == bench.target_unlabeled);
}

TEST_CASE("toy baseline run: no embedding time, defaults echoed") {
  const auto bench = make_shift_benchmark(4, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  ExperimentConfig c;
  c.source_train = files.source_train;
  c.source_unlabeled = files.source_unlabeled;
  c.targets = {{"tgt", files.target_unlabeled, files.target_dev, files.target_test}};
  c.mode = Mode::kBaseline;
  c.report_path = dir.file("report.txt");
  const auto report = run_experiment(c);
  REQUIRE(report.domains.size() == 1);
  CHECK(report.times.embedding_seconds == 0.0);
  CHECK(report.domains[0].test.total > 0);
  const auto kv = read_file(c.report_path + ".kv");
  CHECK(kv.find("dim=100\n") != std::string::npos);
  CHECK(kv.find("negatives=5\n") != std::string::npos);
  CHECK(kv.find("mode=baseline\n") != std::string::npos);
  CHECK(kv.find("target.tgt.test.accuracy=") != std::string::npos);
  CHECK(read_file(c.report_path) == report.to_text());
}

TEST_CASE("reports are reproducible apart from timings") {
  const auto bench = make_shift_benchmark(5, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  const auto c = small_config(files, Mode::kFema);
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  CHECK(a.to_text(false) == b.to_text(false));
  CHECK(a.to_key_values(false) == b.to_key_values(false));
  CHECK(lines_without(a.to_key_values(), "time.") == lines_without(b.to_key_values(), "time."));
  CHECK(a.to_text().find("time_embedding_s") != std::string::npos);
  CHECK(a.to_text(false).find("time_") == std::string::npos);
}

TEST_CASE("seed in the experiment config drives both learners") {
  const auto bench = make_shift_benchmark(6, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  auto c = small_config(files, Mode::kFema);
  c.seed = 11;
  c.embedding.seed = 999;
  c.tagger.seed = 555;
  const auto report = run_experiment(c);
  CHECK(report.config.embedding.seed == 11);
  CHECK(report.config.tagger.seed == 11);
}

TEST_CASE("access audit: test files are only read in the evaluate phase") {
  const auto bench = make_shift_benchmark(7, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  const auto report = run_experiment(small_config(files, Mode::kFema));
  std::set<std::string> phases_for_test, phases_for_dev;
  for (const auto& a : report.accesses) {
    if (a.path == files.target_test) phases_for_test.insert(a.phase);
    if (a.path == files.target_dev) phases_for_dev.insert(a.phase);
  }
  CHECK(phases_for_test == std::set<std::string>{"evaluate"});
  CHECK(phases_for_dev == std::set<std::string>{"evaluate"});
}

TEST_CASE("saved models reproduce the reported accuracy") {
  const auto bench = make_shift_benchmark(8, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  for (const auto mode : {Mode::kBaseline, Mode::kFema, Mode::kWord}) {
    auto c = small_config(files, mode);
    c.model_dir = dir.file(std::string("models_") + std::string(to_string(mode)));
    const auto report = run_experiment(c);
    const auto chain = load_chain(c.model_dir + "/tgt");
    CHECK(chain.representation.mode() == mode);
    const auto test = read_tagged_corpus(files.target_test);
    const auto acc = evaluate_counts(chain.tagger, chain.representation, test);
    CHECK(acc.correct == report.domains[0].test.correct);
    CHECK(acc.total == report.domains[0].test.total);
  }
}

TEST_CASE("shared embeddings train once for several targets") {
  const auto bench = make_shift_benchmark(9, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  auto c = small_config(files, Mode::kFema);
  c.targets.push_back({"again", files.target_unlabeled, files.target_dev, files.target_test});
  c.shared_embeddings = true;
  const auto report = run_experiment(c);
  REQUIRE(report.domains.size() == 2);
  CHECK(report.domains[0].test.correct == report.domains[1].test.correct);
  CHECK(report.to_key_values().find("shared_embeddings=1") != std::string::npos);
}

TEST_CASE("a failing phase is named, writes no report and leaves no model directory") {
  const auto bench = make_shift_benchmark(10, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  const auto bad_dev = dir.file("bad.dev.tagged");
  write_file(bad_dev, "the DT\nzebra UNSEENTAG\n\n");
  auto c = small_config(files, Mode::kBaseline);
  c.targets.push_back({"broken", files.target_unlabeled, bad_dev, files.target_test});
  c.report_path = dir.file("report.txt");
  c.model_dir = dir.file("models");
  try {
    run_experiment(c);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("phase evaluate: ", 0) == 0);
  }
  CHECK_FALSE(fs::exists(c.report_path));
  CHECK_FALSE(fs::exists(c.report_path + ".kv"));
  CHECK_FALSE(fs::exists(c.model_dir));
}

TEST_CASE("configuration errors") {
  const auto bench = make_shift_benchmark(11, 150);
  TempDir dir;
  const auto files = write_benchmark(bench, dir.file("bench"));
  auto c = small_config(files, Mode::kFema);
  c.targets.clear();
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small_config(files, Mode::kFema);
  c.source_train = dir.file("missing");
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small_config(files, Mode::kFema);
  c.targets.push_back(c.targets[0]);
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = small_config(files, Mode::kFema);
  c.embedding.learning_rate = 1e200;
  CHECK_THROWS_AS(run_experiment(c), NumericError);
}
