#include "fema/tagger.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fema/errors.hpp"
#include "fema/noise.hpp"
#include "text_util.hpp"

namespace fema {

static_assert(std::endian::native == std::endian::little, "weight files are little-endian");

void TaggerConfig::validate() const {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
  if (epochs < 1) throw ConfigError("tagger epochs must be >= 1");
  if (threads < 1) throw ConfigError("thread count must be >= 1");
}

TaggerModel::TaggerModel(TagInventory tags, std::size_t sparse_dim, std::size_t dense_dim)
    : tags_(std::move(tags)), sparse_dim_(sparse_dim), dense_dim_(dense_dim),
      weights_(tags_.size(), sparse_dim + 1 + dense_dim) {}

double linear_score(std::span<const double> w, const AugmentedVector& x, std::size_t sparse_dim) {
  if (w.size() != sparse_dim + 1 + x.dense.size()) {
    throw std::invalid_argument("weight width " + std::to_string(w.size()) +
                                " does not match vector with sparse dim " +
                                std::to_string(sparse_dim) + " and dense dim " +
                                std::to_string(x.dense.size()));
  }
  double s = w[sparse_dim];
  for (const auto id : x.sparse) {
    if (id >= sparse_dim) throw std::invalid_argument("sparse id outside model");
    s += w[id];
  }
  const double* wd = w.data() + sparse_dim + 1;
  for (std::size_t i = 0; i < x.dense.size(); ++i) s += wd[i] * x.dense[i];
  return s;
}

namespace {

void check_dims(const TaggerModel& model, const AugmentedVector& x) {
  if (x.dense.size() != model.dense_dim()) {
    throw std::invalid_argument("dense dimension " + std::to_string(x.dense.size()) +
                                " does not match model dense dimension " +
                                std::to_string(model.dense_dim()));
  }
}

// x added to v with coefficient c.
void add_scaled(std::vector<double>& v, const AugmentedVector& x, double c, std::size_t sparse_dim) {
  for (const auto id : x.sparse) v[id] += c;
  v[sparse_dim] += c;
  double* vd = v.data() + sparse_dim + 1;
  for (std::size_t i = 0; i < x.dense.size(); ++i) vd[i] += c * x.dense[i];
}

void shuffle(std::vector<std::size_t>& order, Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

// Stochastic subgradient descent for one tag. The weight vector is kept as
// a * v so the (1 - eta lambda) shrink costs O(1).
std::vector<double> fit_binary(std::span<const LabeledVector> data, std::size_t tag,
                               std::size_t width, std::size_t sparse_dim,
                               const TaggerConfig& config) {
  std::vector<double> v(width, 0.0);
  double a = 1.0;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (const auto i : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const auto& ex = data[i];
      const double s = ex.tag == tag ? 1.0 : -1.0;
      const double margin = s * a * linear_score(v, ex.x, sparse_dim);
      a *= 1.0 - 1.0 / static_cast<double>(t);
      if (a == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        a = 1.0;
      }
      if (margin < 1.0) add_scaled(v, ex.x, eta * s / a, sparse_dim);
      if (a < 1e-9) {
        for (double& x : v) x *= a;
        a = 1.0;
      }
    }
  }
  for (double& x : v) x *= a;
  return v;
}

}  // namespace

std::vector<double> score(const TaggerModel& model, const AugmentedVector& x) {
  check_dims(model, x);
  std::vector<double> out(model.num_tags());
  for (std::size_t y = 0; y < out.size(); ++y) {
    out[y] = linear_score(model.weights().row(y), x, model.sparse_dim());
  }
  return out;
}

std::size_t predict(const TaggerModel& model, const AugmentedVector& x) {
  const auto s = score(model, x);
  if (s.empty()) throw std::invalid_argument("model has no tags");
  std::size_t best = 0;
  for (std::size_t y = 1; y < s.size(); ++y) {
    if (s[y] > s[best]) best = y;
  }
  return best;
}

TaggerModel fit(std::span<const LabeledVector> data, const TagInventory& tags,
                std::size_t sparse_dim, std::size_t dense_dim, const TaggerConfig& config) {
  config.validate();
  if (data.empty()) throw DataError("empty training set");
  if (tags.size() == 0) throw DataError("empty tag inventory");
  for (const auto& ex : data) {
    if (ex.tag >= tags.size()) throw DataError("training tag id outside the inventory");
    if (ex.x.dense.size() != dense_dim) throw std::invalid_argument("inconsistent dense dimension");
    for (const auto id : ex.x.sparse) {
      if (id >= sparse_dim) throw std::invalid_argument("sparse id outside sparse dimension");
    }
  }
  TaggerModel model(tags, sparse_dim, dense_dim);
  const std::size_t width = model.width();
  auto train_tag = [&](std::size_t y) {
    const auto w = fit_binary(data, y, width, sparse_dim, config);
    std::copy(w.begin(), w.end(), model.weights().row(y).begin());
  };
  const std::size_t threads = std::min(config.threads, tags.size());
  if (threads <= 1) {
    for (std::size_t y = 0; y < tags.size(); ++y) train_tag(y);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) {
      pool.emplace_back([&, i] {
        for (std::size_t y = i; y < tags.size(); y += threads) train_tag(y);
      });
    }
    for (auto& th : pool) th.join();
  }
  return model;
}

double svm_objective(std::span<const double> w, std::span<const LabeledVector> data,
                     std::size_t tag, double lambda, std::size_t sparse_dim) {
  double loss = 0;
  for (const auto& ex : data) {
    const double s = ex.tag == tag ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - s * linear_score(w, ex.x, sparse_dim));
  }
  double norm2 = 0;
  for (const double x : w) norm2 += x * x;
  return 0.5 * lambda * norm2 + loss / static_cast<double>(data.size());
}

std::vector<double> svm_subgradient(std::span<const double> w,
                                    std::span<const LabeledVector> data, std::size_t tag,
                                    double lambda, std::size_t sparse_dim) {
  std::vector<double> g(w.begin(), w.end());
  for (double& x : g) x *= lambda;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (const auto& ex : data) {
    const double s = ex.tag == tag ? 1.0 : -1.0;
    if (s * linear_score(w, ex.x, sparse_dim) < 1.0) add_scaled(g, ex.x, -s * inv_n, sparse_dim);
  }
  return g;
}

std::vector<std::size_t> tag_ids(const TaggerModel& model, const Representation& rep,
                                 const Sentence& sentence) {
  if (rep.sparse_dim() != model.sparse_dim() || rep.dense_dim() != model.dense_dim()) {
    throw ConfigError("tagger and representation dimensions disagree");
  }
  std::vector<std::size_t> out;
  out.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) out.push_back(predict(model, rep.featurize(sentence, i)));
  return out;
}

std::vector<std::string> tag_sentence(const TaggerModel& model, const Representation& rep,
                                      const Sentence& sentence) {
  std::vector<std::string> out;
  for (const auto y : tag_ids(model, rep, sentence)) out.push_back(model.tags().name(y));
  return out;
}

Accuracy evaluate_counts(const TaggerModel& model, const Representation& rep,
                         std::span<const TaggedSentence> corpus) {
  if (corpus.empty()) throw DataError("cannot evaluate on an empty corpus");
  Accuracy acc;
  for (const auto& s : corpus) {
    std::vector<std::size_t> gold;
    gold.reserve(s.size());
    for (const auto& tag : s.tags) gold.push_back(model.tags().id(tag));
    const auto predicted = tag_ids(model, rep, s.sentence());
    for (std::size_t i = 0; i < gold.size(); ++i) acc.correct += predicted[i] == gold[i];
    acc.total += gold.size();
  }
  return acc;
}

double evaluate(const TaggerModel& model, const Representation& rep,
                std::span<const TaggedSentence> corpus) {
  return evaluate_counts(model, rep, corpus).value();
}

std::vector<LabeledVector> featurize_corpus(const Representation& rep, const TagInventory& tags,
                                            std::span<const TaggedSentence> corpus) {
  std::vector<LabeledVector> out;
  for (const auto& s : corpus) {
    const Sentence sentence = s.sentence();
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.push_back({rep.featurize(sentence, i), tags.id(s.tags[i])});
    }
  }
  return out;
}

namespace {

constexpr char kWeightMagic[8] = {'F', 'E', 'M', 'A', 'T', 'A', 'G', 'W'};
constexpr std::uint32_t kWeightVersion = 1;
constexpr int kManifestVersion = 1;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

std::string basename(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string dirname(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

}  // namespace

void save_tagger(const TaggerModel& model, const std::string& path) {
  const std::string weights_path = path + ".weights";
  {
    detail::AtomicOutput file(weights_path, true);
    auto& out = file.stream();
    out.write(kWeightMagic, sizeof(kWeightMagic));
    put<std::uint32_t>(out, kWeightVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.num_tags()));
    put<std::uint64_t>(out, model.width());
    const auto data = model.weights().data();
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    out.write(reinterpret_cast<const char*>(bytes), static_cast<std::streamsize>(data.size_bytes()));
    put<std::uint64_t>(out, fnv1a(bytes, data.size_bytes()));
    file.commit();
  }
  detail::AtomicOutput file(path);
  auto& out = file.stream();
  out << "# fema tagger manifest\n";
  out << "format=" << kManifestVersion << '\n';
  out << "tags=";
  for (std::size_t y = 0; y < model.num_tags(); ++y) out << (y ? " " : "") << model.tags().name(y);
  out << '\n';
  out << "sparse_dim=" << model.sparse_dim() << '\n';
  out << "dense_dim=" << model.dense_dim() << '\n';
  out << "weights=" << basename(weights_path) << '\n';
  for (const auto& [key, value] : model.metadata) out << "meta." << key << '=' << value << '\n';
  file.commit();
}

TaggerModel load_tagger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tagger manifest " + path);
  std::map<std::string, std::string> fields;
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(path + ": malformed manifest line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("meta.", 0) == 0) meta[key.substr(5)] = value;
    else fields[key] = value;
  }
  const auto field = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw DataError(path + ": manifest lacks '" + key + "'");
    return it->second;
  };
  if (field("format") != std::to_string(kManifestVersion)) {
    throw DataError(path + ": unsupported tagger manifest version " + field("format"));
  }
  std::vector<std::string> tag_names;
  for (const auto tag : detail::split_whitespace(field("tags"))) tag_names.emplace_back(tag);
  const auto sparse_dim = detail::parse_uint(field("sparse_dim"));
  const auto dense_dim = detail::parse_uint(field("dense_dim"));
  if (!sparse_dim || !dense_dim) throw DataError(path + ": bad dimensions in manifest");

  TaggerModel model(TagInventory(tag_names), *sparse_dim, *dense_dim);
  model.metadata = std::move(meta);

  const std::string weights_path = dirname(path) + field("weights");
  std::ifstream win(weights_path, std::ios::binary);
  if (!win) throw DataError("cannot open tagger weights " + weights_path);
  char magic[sizeof(kWeightMagic)];
  std::uint32_t version = 0, num_tags = 0;
  std::uint64_t width = 0;
  if (!win.read(magic, sizeof(magic)) || std::memcmp(magic, kWeightMagic, sizeof(magic)) != 0) {
    throw DataError(weights_path + ": not a tagger weight file");
  }
  if (!get(win, version) || version != kWeightVersion) {
    throw DataError(weights_path + ": unsupported weight format version " + std::to_string(version));
  }
  if (!get(win, num_tags) || !get(win, width)) throw DataError(weights_path + ": truncated header");
  if (num_tags != model.num_tags() || width != model.width()) {
    throw DataError(weights_path + ": shape does not match manifest");
  }
  auto data = model.weights().data();
  auto* bytes = reinterpret_cast<unsigned char*>(data.data());
  std::uint64_t checksum = 0;
  if (!win.read(reinterpret_cast<char*>(bytes), static_cast<std::streamsize>(data.size_bytes())) ||
      !get(win, checksum)) {
    throw DataError(weights_path + ": truncated weight block");
  }
  if (win.peek() != std::char_traits<char>::eof()) throw DataError(weights_path + ": trailing bytes");
  if (checksum != fnv1a(bytes, data.size_bytes())) throw DataError(weights_path + ": checksum mismatch");
  if (!all_finite(data)) throw DataError(weights_path + ": non-finite weight");
  return model;
}

}  // namespace fema
