#include "fema/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "fema/errors.hpp"
#include "fema/sgns.hpp"
#include "text_util.hpp"

namespace fema {

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  if (negatives < 1) throw ConfigError("number of negative samples must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be > 0");
  if (!(min_learning_rate > 0)) throw ConfigError("minimum learning rate must be > 0");
  if (threads < 1) throw ConfigError("thread count must be >= 1");
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
}

EmbeddingModel::EmbeddingModel(TemplateSet schema, FeatureVocab vocab, std::size_t dim)
    : schema_(std::move(schema)), vocab_(std::move(vocab)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("embedding dimension must be >= 1");
  if (vocab_.num_templates() != schema_.size()) {
    throw std::invalid_argument("vocabulary and schema disagree on the number of templates");
  }
  layout();
}

void EmbeddingModel::layout() {
  row_offsets_.assign(schema_.size(), kNoRow);
  row_templates_.clear();
  std::size_t rows = 0;
  for (const auto t : schema_.embedded()) {
    row_offsets_[t] = rows;
    row_templates_.push_back(t);
    rows += vocab_.size(t);
  }
  input_ = Matrix(rows, dim_);
  output_ = Matrix(rows, dim_);
}

EmbeddingModel EmbeddingModel::initialized(TemplateSet schema, FeatureVocab vocab,
                                           std::size_t dim, std::uint64_t seed) {
  EmbeddingModel model(std::move(schema), std::move(vocab), dim);
  Rng rng(seed);
  const double d = static_cast<double>(dim);
  for (double& x : model.input_.data()) x = (uniform01(rng) - 0.5) / d;
  return model;
}

std::size_t EmbeddingModel::row_of(std::size_t t, FeatureId local) const {
  if (t >= row_offsets_.size() || row_offsets_[t] == kNoRow) {
    throw std::out_of_range("template " + std::to_string(t) + " is not embedded");
  }
  if (local >= vocab_.size(t)) {
    throw std::out_of_range("feature " + std::to_string(local) + " outside template " +
                            vocab_.template_name(t));
  }
  return row_offsets_[t] + local;
}

std::size_t EmbeddingModel::row_of(FeatureId global) const {
  const auto t = vocab_.template_of(global);
  return row_of(t, global - vocab_.offset(t));
}

FeatureId EmbeddingModel::feature_of_row(std::size_t row) const {
  for (const auto t : row_templates_) {
    if (row < row_offsets_[t] + vocab_.size(t)) {
      return vocab_.offset(t) + static_cast<FeatureId>(row - row_offsets_[t]);
    }
  }
  throw std::out_of_range("row " + std::to_string(row) + " outside embedding model");
}

bool EmbeddingModel::finite() const { return all_finite(input_.data()) && all_finite(output_.data()); }

double instance_objective(const EmbeddingModel& model, const Instance& instance,
                          const NoiseTable& noise, std::size_t negatives, Rng& rng) {
  const auto& embedded = model.schema().embedded();
  if (embedded.empty()) return 0.0;
  std::vector<VectorView> negs(negatives);
  double total = 0;
  for (const auto t : embedded) {
    const auto u = model.input_row(instance.active.at(t));
    for (const auto tp : embedded) {
      if (tp == t) continue;
      const auto v_pos = model.output_row(instance.active.at(tp));
      for (auto& v : negs) v = model.output_row(noise.sample(tp, rng));
      total += pair_objective(u, v_pos, negs);
    }
  }
  return total / static_cast<double>(embedded.size());
}

namespace {

// Per-thread state for the shared SGD engine.
struct Worker {
  Rng rng;
  std::vector<double> grad;
};

// One sampled pair update: ascent on log s(u.v_pos) + sum_j log s(-u.v_j).
// Output rows are updated in place as they are visited; u takes the
// accumulated step at the end. Negatives equal to the positive are kept.
void sgd_pair(EmbeddingModel& model, const NoiseTable& noise, std::size_t in_row,
              std::size_t out_row, std::size_t noise_template, std::size_t negatives, double lr,
              Worker& w) {
  auto u = model.input().row(in_row);
  std::fill(w.grad.begin(), w.grad.end(), 0.0);

  auto v = model.output().row(out_row);
  double g = lr * (1.0 - sigmoid(dot(u, v)));
  axpy(g, v, w.grad);
  axpy(g, u, v);

  const FeatureId base = model.vocab().offset(noise_template);
  for (std::size_t j = 0; j < negatives; ++j) {
    const FeatureId neg = noise.sample(noise_template, w.rng);
    auto vn = model.output().row(model.row_of(noise_template, neg - base));
    g = -lr * sigmoid(dot(u, vn));
    axpy(g, vn, w.grad);
    axpy(g, u, vn);
  }
  axpy(1.0, w.grad, u);
}

// Drives `process(unit, lr, worker)` over units [0, num_units) for every
// epoch, sharding contiguously across threads. The learning rate decays
// linearly with the number of processed units.
template <typename Process>
void run_epochs(EmbeddingModel& model, std::size_t num_units, const TrainConfig& config,
                const EpochCallback& on_epoch, Process&& process) {
  const std::size_t threads = std::min<std::size_t>(config.threads, std::max<std::size_t>(num_units, 1));
  std::vector<Worker> workers(threads);
  for (std::size_t i = 0; i < threads; ++i) {
    workers[i].rng.seed(config.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL * (i + 1));
    workers[i].grad.assign(config.dim, 0.0);
  }
  const double total = static_cast<double>(config.epochs) * static_cast<double>(num_units);
  const double floor = std::min(config.min_learning_rate, config.learning_rate);
  std::atomic<std::size_t> processed{0};

  auto shard = [&](std::size_t i) {
    const std::size_t begin = num_units * i / threads;
    const std::size_t end = num_units * (i + 1) / threads;
    for (std::size_t unit = begin; unit < end; ++unit) {
      const double progress = static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed)) / total;
      const double lr = std::max(config.learning_rate * (1.0 - 0.99 * progress), floor);
      process(unit, lr, workers[i]);
    }
  };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (threads == 1) {
      shard(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(shard, i);
      for (auto& th : pool) th.join();
    }
    if (!model.finite()) {
      throw NumericError("non-finite embedding value after epoch " + std::to_string(epoch));
    }
    if (on_epoch) on_epoch(epoch, model);
  }
}

}  // namespace

EmbeddingModel train(std::span<const Instance> instances, const FeatureVocab& vocab,
                     const TemplateSet& schema, const TrainConfig& config,
                     const EpochCallback& on_epoch) {
  config.validate();
  if (instances.empty()) throw DataError("no instances to train embeddings on");
  if (vocab.num_templates() != schema.size()) {
    throw ConfigError("vocabulary was not built with this schema");
  }
  auto model = EmbeddingModel::initialized(schema, vocab, config.dim, config.seed);
  const NoiseTable noise(model.vocab(), model.schema());
  const auto& embedded = schema.embedded();

  // Row indices of every instance's embedded features, validated up front.
  std::vector<std::size_t> rows(instances.size() * embedded.size());
  for (std::size_t n = 0; n < instances.size(); ++n) {
    if (instances[n].active.size() != schema.size()) {
      throw DataError("instance " + std::to_string(n) + " is not total over the schema");
    }
    for (std::size_t e = 0; e < embedded.size(); ++e) {
      rows[n * embedded.size() + e] = model.row_of(instances[n].active[embedded[e]]);
    }
  }

  const std::size_t te = embedded.size();
  run_epochs(model, instances.size(), config, on_epoch,
             [&](std::size_t n, double lr, Worker& w) {
               const std::size_t* r = rows.data() + n * te;
               for (std::size_t a = 0; a < te; ++a) {
                 for (std::size_t b = 0; b < te; ++b) {
                   if (a == b) continue;
                   sgd_pair(model, noise, r[a], r[b], embedded[b], config.negatives, lr, w);
                 }
               }
             });
  return model;
}

TemplateSet word_schema() {
  TemplateDescriptor d;
  d.name = "word";
  d.kind = TemplateKind::kLexical;
  d.offset = 0;
  d.embedded = true;
  return TemplateSet({d});
}

std::vector<std::pair<FeatureId, FeatureId>> window_pairs(std::span<const FeatureId> sentence,
                                                          std::size_t window) {
  std::vector<std::pair<FeatureId, FeatureId>> out;
  for_each_window_pair(sentence, window, [&](FeatureId c, FeatureId o) { out.emplace_back(c, o); });
  return out;
}

EmbeddingModel train_word_baseline(std::span<const Sentence> sentences, const TrainConfig& config,
                                   const EpochCallback& on_epoch) {
  config.validate();
  if (sentences.empty()) throw DataError("no sentences to train word embeddings on");
  const TemplateSet schema = word_schema();
  auto vocab = build_vocab(sentences, schema, config.min_count);
  auto model = EmbeddingModel::initialized(schema, std::move(vocab), config.dim, config.seed);
  const NoiseTable noise(model.vocab(), model.schema());

  std::vector<std::vector<FeatureId>> encoded;
  encoded.reserve(sentences.size());
  for (const auto& s : sentences) {
    auto& ids = encoded.emplace_back();
    ids.reserve(s.size());
    for (const auto& token : s.tokens) ids.push_back(model.vocab().lookup(0, token));
  }

  run_epochs(model, encoded.size(), config, on_epoch, [&](std::size_t n, double lr, Worker& w) {
    for_each_window_pair(std::span<const FeatureId>(encoded[n]), config.window,
                         [&](FeatureId center, FeatureId context) {
                           sgd_pair(model, noise, model.row_of(0, center), model.row_of(0, context),
                                    0, config.negatives, lr, w);
                         });
  });
  return model;
}

namespace {

void write_matrix(const EmbeddingModel& model, const Matrix& m, const std::string& path) {
  detail::AtomicOutput file(path);
  auto& out = file.stream();
  out << m.rows() << ' ' << m.cols() << '\n';
  const auto& vocab = model.vocab();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const FeatureId f = model.feature_of_row(r);
    const auto t = vocab.template_of(f);
    out << feature_string(model.schema(), t, vocab.value(t, f - vocab.offset(t)));
    for (const double x : m.row(r)) out << ' ' << detail::format_double(x);
    out << '\n';
  }
  file.commit();
}

struct Row {
  std::size_t t;
  std::string value;
  std::vector<double> values;
};

std::vector<Row> read_rows(const std::string& path, const TemplateSet& schema, std::size_t& dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing header");
  const auto header = detail::split_whitespace(line);
  const auto count = header.size() == 2 ? detail::parse_uint(header[0]) : std::nullopt;
  const auto d = header.size() == 2 ? detail::parse_uint(header[1]) : std::nullopt;
  if (!count || !d || *d == 0) throw DataError(path + ":1: bad header, expected 'COUNT DIM'");
  dim = *d;

  std::vector<Row> rows;
  rows.reserve(*count);
  std::size_t line_no = 1;
  while (rows.size() < *count && std::getline(in, line)) {
    ++line_no;
    const auto where = detail::location(path, line_no);
    const auto fields = detail::split_whitespace(line);
    if (fields.size() != dim + 1) {
      throw DataError(where + ": expected label and " + std::to_string(dim) + " values");
    }
    const auto eq = fields[0].find('=');
    if (eq == std::string_view::npos) throw DataError(where + ": label lacks 'template='");
    const auto t = schema.find(fields[0].substr(0, eq));
    if (!t || !schema[*t].embedded) {
      throw DataError(where + ": unknown or non-embedded template in '" + std::string(fields[0]) + "'");
    }
    Row row{*t, std::string(fields[0].substr(eq + 1)), std::vector<double>(dim)};
    for (std::size_t i = 0; i < dim; ++i) {
      const auto v = detail::parse_double(fields[i + 1]);
      if (!v) throw DataError(where + ": bad number '" + std::string(fields[i + 1]) + "'");
      if (!std::isfinite(*v)) throw DataError(where + ": non-finite value");
      row.values[i] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != *count) {
    throw DataError(path + ": truncated, header promises " + std::to_string(*count) +
                    " rows but found " + std::to_string(rows.size()));
  }
  while (std::getline(in, line)) {
    if (!detail::trim_right(line).empty()) throw DataError(path + ": rows beyond header COUNT");
  }
  return rows;
}

void fill(EmbeddingModel& model, Matrix& m, const std::vector<Row>& rows, std::size_t dim,
          const std::string& path) {
  if (dim != model.dim() || rows.size() != model.rows()) {
    throw DataError(path + ": shape does not match the embedding model");
  }
  const auto& vocab = model.vocab();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto local = row.value.empty() ? std::optional<FeatureId>(FeatureVocab::kUnkLocal)
                                         : vocab.find_local(row.t, row.value);
    if (!local || model.row_of(row.t, *local) != r) {
      throw DataError(path + ": row " + std::to_string(r) + " does not match the vocabulary");
    }
    std::copy(row.values.begin(), row.values.end(), m.row(r).begin());
  }
}

}  // namespace

void save_embeddings(const EmbeddingModel& model, const std::string& path) {
  write_matrix(model, model.input(), path);
  write_matrix(model, model.output(), path + ".out");
  model.vocab().save(path + ".vocab");
  model.schema().save(path + ".schema");
}

EmbeddingModel load_embeddings(const std::string& path) {
  return load_embeddings(path, TemplateSet::load(path + ".schema"));
}

EmbeddingModel load_embeddings(const std::string& path, const TemplateSet& schema) {
  std::size_t dim = 0;
  const auto rows = read_rows(path, schema, dim);

  FeatureVocab vocab;
  if (std::filesystem::exists(path + ".vocab")) {
    vocab = FeatureVocab::load(path + ".vocab");
    if (vocab.num_templates() != schema.size()) {
      throw DataError(path + ".vocab: template count does not match the schema");
    }
    for (std::size_t t = 0; t < schema.size(); ++t) {
      if (vocab.template_name(t) != schema[t].name) {
        throw DataError(path + ".vocab: template order does not match the schema");
      }
    }
  } else {
    std::vector<std::string> names;
    for (const auto& d : schema.templates()) names.push_back(d.name);
    vocab = FeatureVocab(std::move(names));
    for (const auto& row : rows) {
      if (!row.value.empty()) vocab.add(row.t, row.value, 0);
    }
  }

  EmbeddingModel model(schema, std::move(vocab), dim);
  fill(model, model.input(), rows, dim, path);
  const std::string out_path = path + ".out";
  if (std::filesystem::exists(out_path)) {
    std::size_t out_dim = 0;
    const auto out_rows = read_rows(out_path, schema, out_dim);
    fill(model, model.output(), out_rows, out_dim, out_path);
  }
  return model;
}

}  // namespace fema
