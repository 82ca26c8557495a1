// corpus.cc
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

#include "embstab/corpus.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "embstab/errors.h"
#include "embstab/hashing.h"
#include "embstab/parallel.h"

namespace embstab {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// ASCII only; multi-byte UTF-8 sequences pass through untouched.
std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename Fn>
void split_whitespace(std::string_view s, Fn&& fn) {
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) fn(s.substr(i, j - i));
    i = j;
  }
}

}  // namespace

std::optional<TaggedSentence> parse_tagged_line(std::string_view line,
                                                std::size_t line_number,
                                                const TagFormat& format) {
  TaggedSentence sentence;
  sentence.line = line_number;

  auto emit_words = [&](std::string_view text) {
    if (text.find(format.close) != std::string_view::npos) {
      throw ParseError(line_number, "unmatched '" + std::string(1, format.close) + "'");
    }
    split_whitespace(text, [&](std::string_view w) {
      sentence.tokens.emplace_back(Word{lowercase(w)});
    });
  };

  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t open = line.find(format.open, pos);
    if (open == std::string_view::npos) {
      emit_words(line.substr(pos));
      break;
    }
    emit_words(line.substr(pos, open - pos));
    const std::size_t close = line.find(format.close, open + 1);
    if (close == std::string_view::npos) {
      throw ParseError(line_number, "unclosed concept bracket");
    }
    const std::string_view inner = line.substr(open + 1, close - open - 1);
    if (inner.find(format.open) != std::string_view::npos) {
      throw ParseError(line_number, "nested concept bracket");
    }
    const std::size_t sep = inner.rfind(format.separator);
    if (sep == std::string_view::npos) {
      throw ParseError(line_number, "concept markup without '" +
                                        std::string(1, format.separator) + "'");
    }
    const std::string_view id = trim(inner.substr(sep + 1));
    if (id.empty()) throw ParseError(line_number, "empty concept id");
    if (std::any_of(id.begin(), id.end(), is_space)) {
      throw ParseError(line_number, "concept id contains whitespace");
    }
    sentence.tokens.emplace_back(
        Concept{std::string(id), std::string(trim(inner.substr(0, sep)))});
    pos = close + 1;
  }

  if (sentence.tokens.empty()) return std::nullopt;
  return sentence;
}

void for_each_tagged_sentence(std::istream& in, const TagFormat& format,
                              const std::function<void(TaggedSentence&&)>& sink,
                              const std::function<void()>& on_document_break) {
  std::string line;
  std::size_t line_number = 0;
  bool pending_break = false;
  bool seen_sentence = false;
  while (std::getline(in, line)) {
    ++line_number;
    auto sentence = parse_tagged_line(line, line_number, format);
    if (!sentence) {
      pending_break = seen_sentence;
      continue;
    }
    if (pending_break && on_document_break) on_document_break();
    pending_break = false;
    seen_sentence = true;
    sink(std::move(*sentence));
  }
}

std::vector<TaggedSentence> parse_tagged_text(std::istream& in, const TagFormat& format) {
  std::vector<TaggedSentence> out;
  for_each_tagged_sentence(in, format, [&](TaggedSentence&& s) { out.push_back(std::move(s)); });
  return out;
}

Mode parse_mode(std::string_view name) {
  if (name == "cui2vec") return Mode::kCui2vec;
  if (name == "nlm") return Mode::kNlm;
  if (name == "words") return Mode::kWords;
  throw InputError("unknown mode '" + std::string(name) + "' (expected cui2vec, nlm or words)");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kCui2vec:
      return "cui2vec";
    case Mode::kNlm:
      return "nlm";
    case Mode::kWords:
      return "words";
  }
  return "unknown";
}

std::vector<std::string> transform_cui2vec(const TaggedSentence& sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const Token& token : sentence.tokens) {
    if (const auto* c = std::get_if<Concept>(&token)) {
      out.push_back(c->id);
    } else {
      out.push_back(std::get<Word>(token).surface);
    }
  }
  return out;
}

std::vector<std::string> transform_nlm(const TaggedSentence& sentence) {
  std::vector<std::string> out;
  for (const Token& token : sentence.tokens) {
    if (const auto* c = std::get_if<Concept>(&token)) out.push_back(c->id);
  }
  return out;
}

std::vector<std::string> transform_words(const TaggedSentence& sentence) {
  std::vector<std::string> out;
  for (const Token& token : sentence.tokens) {
    if (const auto* c = std::get_if<Concept>(&token)) {
      split_whitespace(c->surface, [&](std::string_view w) { out.push_back(lowercase(w)); });
    } else {
      out.push_back(std::get<Word>(token).surface);
    }
  }
  return out;
}

std::vector<std::string> transform(const TaggedSentence& sentence, Mode mode) {
  switch (mode) {
    case Mode::kCui2vec:
      return transform_cui2vec(sentence);
    case Mode::kNlm:
      return transform_nlm(sentence);
    case Mode::kWords:
      return transform_words(sentence);
  }
  return {};
}

TokenCorpus transform_corpus(const std::vector<TaggedSentence>& sentences, Mode mode) {
  TokenCorpus corpus;
  corpus.documents = sentences.empty() ? 0 : 1;
  for (const TaggedSentence& sentence : sentences) {
    if (mode != Mode::kWords) {
      for (const Token& token : sentence.tokens) {
        if (const auto* c = std::get_if<Concept>(&token)) corpus.concepts.insert(c->id);
      }
    }
    auto tokens = transform(sentence, mode);
    if (!tokens.empty()) corpus.sentences.push_back(std::move(tokens));
  }
  return corpus;
}

void write_token_corpus(std::ostream& out, const TokenCorpus& corpus) {
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out << ' ';
      out << sentence[i];
    }
    out << '\n';
  }
}

TokenCorpus read_token_corpus(std::istream& in) {
  TokenCorpus corpus;
  std::string line;
  bool pending_break = false;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    split_whitespace(line, [&](std::string_view t) { tokens.emplace_back(t); });
    if (tokens.empty()) {
      pending_break = !corpus.sentences.empty();
      continue;
    }
    if (corpus.sentences.empty() || pending_break) ++corpus.documents;
    pending_break = false;
    corpus.sentences.push_back(std::move(tokens));
  }
  return corpus;
}

Vocabulary::Vocabulary(std::vector<Entry> entries, std::uint64_t min_count,
                       std::uint64_t total_tokens)
    : entries_(std::move(entries)), min_count_(min_count), total_tokens_(total_tokens) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].token, static_cast<std::int32_t>(i)).second) {
      throw InputError("duplicate vocabulary token '" + entries_[i].token + "'");
    }
  }
}

std::optional<std::int32_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocabulary::index_of(std::string_view token) const {
  auto idx = find(token);
  if (!idx) throw InputError("token '" + std::string(token) + "' not in vocabulary");
  return *idx;
}

std::uint64_t Vocabulary::retained_tokens() const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) sum += e.frequency;
  return sum;
}

void Vocabulary::write(std::ostream& out) const { out << serialize(); }

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out += entries_[i].token;
    out += '\t';
    out += std::to_string(i);
    out += '\t';
    out += std::to_string(entries_[i].frequency);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_number = 0;
  std::uint64_t min_freq = 0;
  std::uint64_t total = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(line_number, "expected token<TAB>index<TAB>frequency");
    std::size_t index = 0;
    std::uint64_t freq = 0;
    try {
      index = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
      freq = std::stoull(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw ParseError(line_number, "malformed index or frequency");
    }
    if (index != entries.size()) throw ParseError(line_number, "vocabulary indices must be dense and ordered");
    entries.push_back({line.substr(0, t1), freq});
    min_freq = entries.size() == 1 ? freq : std::min(min_freq, freq);
    total += freq;
  }
  return Vocabulary(std::move(entries), std::max<std::uint64_t>(1, min_freq), total);
}

std::string Vocabulary::fingerprint() const { return sha256_hex(serialize()); }

VocabResult build_vocab(const std::vector<std::vector<std::string>>& sentences,
                        std::uint64_t min_count, std::size_t jobs) {
  if (min_count < 1) throw InputError("min_count must be >= 1");

  using Counts = std::unordered_map<std::string, std::uint64_t>;
  jobs = std::max<std::size_t>(1, std::min(jobs, sentences.size()));
  std::vector<Counts> shards(jobs);
  const std::size_t step = sentences.empty() ? 1 : (sentences.size() + jobs - 1) / jobs;
  parallel_for(jobs, jobs, [&](std::size_t shard) {
    const std::size_t begin = shard * step;
    const std::size_t end = std::min(sentences.size(), begin + step);
    for (std::size_t s = begin; s < end; ++s) {
      for (const auto& t : sentences[s]) ++shards[shard][t];
    }
  });

  CorpusStats stats;
  stats.sentences = sentences.size();
  stats.documents = sentences.empty() ? 0 : 1;
  for (auto& shard : shards) {
    for (auto& [token, count] : shard) stats.raw_frequency[token] += count;
  }
  for (const auto& [token, count] : stats.raw_frequency) stats.total_occurrences += count;
  if (stats.total_occurrences == 0) throw InputError("empty corpus");

  std::vector<Vocabulary::Entry> kept;
  for (const auto& [token, count] : stats.raw_frequency) {
    if (count >= min_count) kept.push_back({token, count});
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.token < b.token;
  });
  return {Vocabulary(std::move(kept), min_count, stats.total_occurrences), std::move(stats)};
}

VocabResult build_vocab(const TokenCorpus& corpus, std::uint64_t min_count, std::size_t jobs) {
  auto result = build_vocab(corpus.sentences, min_count, jobs);
  result.stats.documents = corpus.documents;
  return result;
}

EncodedCorpus encode(const std::vector<std::vector<std::string>>& sentences,
                     const Vocabulary& vocab) {
  EncodedCorpus out;
  out.reserve(sentences.size());
  for (const auto& sentence : sentences) {
    std::vector<std::int32_t> ids;
    ids.reserve(sentence.size());
    for (const auto& t : sentence) {
      if (auto idx = vocab.find(t)) ids.push_back(*idx);
    }
    if (!ids.empty()) out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace embstab
