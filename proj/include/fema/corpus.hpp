#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fema {

// Reserved tokens that pad the sentence at offsets -2, -1, +1, +2.
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kBos2 = "<s2>";
inline constexpr std::string_view kEos2 = "</s2>";

bool is_reserved_token(std::string_view token);

struct Sentence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;

  std::size_t size() const { return tokens.size(); }
  Sentence sentence() const { return Sentence{tokens}; }
  bool operator==(const TaggedSentence&) const = default;
};

enum class CorpusFormat {
  kTagged,  // token<TAB>tag per line, blank line between sentences
  kPlain,   // one whitespace-tokenized sentence per line
};

// Streams sentences from a file in file order. Errors carry "path:line".
class CorpusReader {
 public:
  CorpusReader(std::string path, CorpusFormat format);

  // Tagged format only.
  std::optional<TaggedSentence> next_tagged();
  // Either format; tags are discarded for tagged input.
  std::optional<Sentence> next();

  const std::string& path() const { return path_; }
  CorpusFormat format() const { return format_; }

 private:
  std::optional<TaggedSentence> read_tagged();
  std::optional<Sentence> read_plain();
  void check_token(std::string_view token) const;

  std::string path_;
  CorpusFormat format_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

std::vector<TaggedSentence> read_tagged_corpus(const std::string& path);
std::vector<Sentence> read_plain_corpus(const std::string& path);
// Dispatches on format; tagged input is stripped of its tags.
std::vector<Sentence> read_sentences(const std::string& path, CorpusFormat format);

void write_tagged(std::ostream& out, const TaggedSentence& sentence);
void write_plain(std::ostream& out, const Sentence& sentence);
void write_tagged_corpus(const std::string& path, const std::vector<TaggedSentence>& corpus);
void write_plain_corpus(const std::string& path, const std::vector<Sentence>& corpus);

// Closed tag set: ids are contiguous in first-seen order.
class TagInventory {
 public:
  TagInventory() = default;
  explicit TagInventory(std::vector<std::string> tags);

  static TagInventory from_corpus(std::span<const TaggedSentence> corpus);

  std::size_t size() const { return tags_.size(); }
  const std::string& name(std::size_t id) const { return tags_.at(id); }
  const std::vector<std::string>& names() const { return tags_; }
  std::optional<std::size_t> find(std::string_view tag) const;
  // Throws DataError for tags outside the inventory.
  std::size_t id(std::string_view tag) const;

 private:
  std::size_t add(const std::string& tag);

  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::size_t> ids_;
};

}  // namespace fema
