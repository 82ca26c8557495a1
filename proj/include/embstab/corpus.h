// corpus.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Corpus ingestion: concept-tagged text parsing, the cui2vec / NLM / words
// transformations, and vocabulary construction.
//
// Tagged input is one sentence per line. A concept is written inline as
// `[surface words|CONCEPT_ID]`; everything else is whitespace-tokenized and
// lowercased. Blank lines separate documents and emit no sentence.

#ifndef EMBSTAB_CORPUS_H_
#define EMBSTAB_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace embstab {

struct Word {
  std::string surface;
  bool operator==(const Word&) const = default;
};

struct Concept {
  std::string id;
  std::string surface;
  bool operator==(const Concept&) const = default;
};

using Token = std::variant<Word, Concept>;

struct TaggedSentence {
  std::vector<Token> tokens;  // never empty
  std::size_t line = 0;       // 1-based source line
};

// Delimiters of the inline concept markup.
struct TagFormat {
  char open = '[';
  char separator = '|';
  char close = ']';
};

// Parses a single line. Returns nullopt for blank lines. Throws ParseError on
// unclosed or nested brackets, a missing separator, or an empty concept id.
std::optional<TaggedSentence> parse_tagged_line(std::string_view line,
                                                std::size_t line_number,
                                                const TagFormat& format = {});

// Streams sentences to `sink` in input order. `on_document_break` (optional)
// is called once for every run of blank lines that follows a sentence.
void for_each_tagged_sentence(std::istream& in, const TagFormat& format,
                              const std::function<void(TaggedSentence&&)>& sink,
                              const std::function<void()>& on_document_break = {});

std::vector<TaggedSentence> parse_tagged_text(std::istream& in,
                                              const TagFormat& format = {});

enum class Mode { kCui2vec, kNlm, kWords };

Mode parse_mode(std::string_view name);  // throws InputError
std::string_view mode_name(Mode mode);

// Concepts become their id, words their surface. Length is preserved.
std::vector<std::string> transform_cui2vec(const TaggedSentence& sentence);

// Only concept ids survive; may be empty.
std::vector<std::string> transform_nlm(const TaggedSentence& sentence);

// Original running text: concept surfaces are split and lowercased like any
// other word. Identity on untagged input.
std::vector<std::string> transform_words(const TaggedSentence& sentence);

std::vector<std::string> transform(const TaggedSentence& sentence, Mode mode);

// A transformed corpus, ready for vocabulary construction and training.
struct TokenCorpus {
  std::vector<std::vector<std::string>> sentences;  // no empty sentences
  std::size_t documents = 0;
  std::set<std::string> concepts;  // concept ids seen; empty in words mode
};

TokenCorpus transform_corpus(const std::vector<TaggedSentence>& sentences, Mode mode);

// Token stream file: one sentence per line, tokens separated by single
// spaces. Blank lines mark document breaks.
void write_token_corpus(std::ostream& out, const TokenCorpus& corpus);
TokenCorpus read_token_corpus(std::istream& in);

struct CorpusStats {
  std::unordered_map<std::string, std::uint64_t> raw_frequency;  // pre-filter
  std::uint64_t total_occurrences = 0;
  std::size_t documents = 0;
  std::size_t sentences = 0;
};

class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t frequency = 0;
  };

  Vocabulary() = default;

  // Entries must already be in index order; frequencies non-increasing is
  // not required (a vocabulary read from disk is taken as given).
  Vocabulary(std::vector<Entry> entries, std::uint64_t min_count,
             std::uint64_t total_tokens);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::optional<std::int32_t> find(std::string_view token) const;
  std::int32_t index_of(std::string_view token) const;  // throws InputError
  const std::string& token(std::size_t index) const { return entries_[index].token; }
  std::uint64_t frequency(std::size_t index) const { return entries_[index].frequency; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::uint64_t min_count() const { return min_count_; }
  std::uint64_t total_tokens() const { return total_tokens_; }
  std::uint64_t retained_tokens() const;

  // `token<TAB>index<TAB>frequency` per line.
  void write(std::ostream& out) const;
  std::string serialize() const;
  static Vocabulary read(std::istream& in);

  // SHA-256 of serialize(); identifies the vocabulary an embedding was
  // trained over.
  std::string fingerprint() const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::int32_t, Hash, std::equal_to<>> index_;
  std::uint64_t min_count_ = 1;
  std::uint64_t total_tokens_ = 0;
};

struct VocabResult {
  Vocabulary vocabulary;
  CorpusStats stats;
};

// Counts tokens (sharded over `jobs` threads, merged deterministically) and
// keeps those with frequency >= min_count, ordered by descending frequency
// then lexicographically. Throws InputError on an empty corpus or
// min_count < 1.
VocabResult build_vocab(const std::vector<std::vector<std::string>>& sentences,
                        std::uint64_t min_count, std::size_t jobs = 1);
VocabResult build_vocab(const TokenCorpus& corpus, std::uint64_t min_count,
                        std::size_t jobs = 1);

// Sentences as vocabulary indices with out-of-vocabulary tokens removed.
// Sentences that end up empty are dropped.
using EncodedCorpus = std::vector<std::vector<std::int32_t>>;

EncodedCorpus encode(const std::vector<std::vector<std::string>>& sentences,
                     const Vocabulary& vocab);

}  // namespace embstab

#endif  // EMBSTAB_CORPUS_H_
