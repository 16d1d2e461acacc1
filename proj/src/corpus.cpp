#include "fema/corpus.hpp"

#include "fema/errors.hpp"
#include "text_util.hpp"

namespace fema {

bool is_reserved_token(std::string_view token) {
  return token == kBos || token == kEos || token == kBos2 || token == kEos2;
}

CorpusReader::CorpusReader(std::string path, CorpusFormat format)
    : path_(std::move(path)), format_(format), in_(path_) {
  if (!in_) throw DataError("cannot open corpus " + path_);
}

void CorpusReader::check_token(std::string_view token) const {
  if (is_reserved_token(token)) {
    throw DataError(detail::location(path_, line_no_) + ": reserved token '" +
                    std::string(token) + "'");
  }
}

std::optional<TaggedSentence> CorpusReader::read_tagged() {
  TaggedSentence sentence;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const std::string_view body = detail::trim_right(line);
    if (body.empty()) {
      if (!sentence.tokens.empty()) return sentence;
      continue;
    }
    const auto fields = detail::split(body, '\t');
    if (fields.size() != 2) {
      throw DataError(detail::location(path_, line_no_) + ": expected token<TAB>tag, got " +
                      std::to_string(fields.size()) + " fields");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw DataError(detail::location(path_, line_no_) + ": empty token or tag");
    }
    if (detail::split_whitespace(fields[0]).size() != 1 ||
        detail::split_whitespace(fields[1]).size() != 1) {
      throw DataError(detail::location(path_, line_no_) + ": whitespace inside token or tag");
    }
    check_token(fields[0]);
    sentence.tokens.emplace_back(fields[0]);
    sentence.tags.emplace_back(fields[1]);
  }
  if (!sentence.tokens.empty()) return sentence;
  return std::nullopt;
}

std::optional<Sentence> CorpusReader::read_plain() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const auto tokens = detail::split_whitespace(line);
    if (tokens.empty()) continue;
    Sentence sentence;
    sentence.tokens.reserve(tokens.size());
    for (const auto token : tokens) {
      check_token(token);
      sentence.tokens.emplace_back(token);
    }
    return sentence;
  }
  return std::nullopt;
}

std::optional<TaggedSentence> CorpusReader::next_tagged() {
  if (format_ != CorpusFormat::kTagged) {
    throw DataError(path_ + ": tagged sentences requested from an untagged corpus");
  }
  return read_tagged();
}

std::optional<Sentence> CorpusReader::next() {
  if (format_ == CorpusFormat::kPlain) return read_plain();
  auto tagged = read_tagged();
  if (!tagged) return std::nullopt;
  return Sentence{std::move(tagged->tokens)};
}

std::vector<TaggedSentence> read_tagged_corpus(const std::string& path) {
  CorpusReader reader(path, CorpusFormat::kTagged);
  std::vector<TaggedSentence> out;
  while (auto s = reader.next_tagged()) out.push_back(std::move(*s));
  return out;
}

std::vector<Sentence> read_plain_corpus(const std::string& path) {
  return read_sentences(path, CorpusFormat::kPlain);
}

std::vector<Sentence> read_sentences(const std::string& path, CorpusFormat format) {
  CorpusReader reader(path, format);
  std::vector<Sentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

void write_tagged(std::ostream& out, const TaggedSentence& sentence) {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    out << sentence.tokens[i] << '\t' << sentence.tags[i] << '\n';
  }
  out << '\n';
}

void write_plain(std::ostream& out, const Sentence& sentence) {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i > 0) out << ' ';
    out << sentence.tokens[i];
  }
  out << '\n';
}

void write_tagged_corpus(const std::string& path, const std::vector<TaggedSentence>& corpus) {
  detail::AtomicOutput file(path);
  for (const auto& s : corpus) write_tagged(file.stream(), s);
  file.commit();
}

void write_plain_corpus(const std::string& path, const std::vector<Sentence>& corpus) {
  detail::AtomicOutput file(path);
  for (const auto& s : corpus) write_plain(file.stream(), s);
  file.commit();
}

TagInventory::TagInventory(std::vector<std::string> tags) {
  for (const auto& tag : tags) {
    if (ids_.count(tag) != 0) throw DataError("duplicate tag '" + tag + "' in inventory");
    add(tag);
  }
}

TagInventory TagInventory::from_corpus(std::span<const TaggedSentence> corpus) {
  TagInventory inventory;
  for (const auto& sentence : corpus) {
    for (const auto& tag : sentence.tags) inventory.add(tag);
  }
  return inventory;
}

std::size_t TagInventory::add(const std::string& tag) {
  const auto [it, inserted] = ids_.try_emplace(tag, tags_.size());
  if (inserted) tags_.push_back(tag);
  return it->second;
}

std::optional<std::size_t> TagInventory::find(std::string_view tag) const {
  const auto it = ids_.find(std::string(tag));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t TagInventory::id(std::string_view tag) const {
  const auto found = find(tag);
  if (!found) throw DataError("tag '" + std::string(tag) + "' is not in the tag inventory");
  return *found;
}

}  // namespace fema
