// noisiness.h
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
// Context-word profiles and their normalized entropy
//
//   H(w) = -sum_i P(w_i) log P(w_i) / log |C_w|
//
// with P(w_i) the share of context word w_i among all of w's context
// occurrences and |C_w| the number of distinct context words. H is 1 for a
// flat context distribution and approaches 0 when a few words dominate.

#ifndef EMBSTAB_NOISINESS_H_
#define EMBSTAB_NOISINESS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "embstab/corpus.h"

namespace embstab {

struct ContextProfile {
  std::int32_t token = 0;
  // (context token, count), ascending by context token, counts > 0.
  std::vector<std::pair<std::int32_t, std::uint64_t>> counts;
  std::uint64_t total = 0;

  std::size_t distinct() const { return counts.size(); }
  bool empty() const { return counts.empty(); }
};

// One profile per vocabulary index. Every occurrence of t at position i adds
// the tokens at distance 1..window on both sides, within the sentence. The
// window is fixed. Corpus shards are counted on `jobs` threads and merged.
std::vector<ContextProfile> collect_context_profiles(const EncodedCorpus& corpus,
                                                     std::size_t vocab_size, int window,
                                                     std::size_t jobs = 1);

// nullopt for an empty profile ("no context"); 0 when there is a single
// distinct context word; exactly 1 when all distinct counts are equal.
std::optional<double> normalized_entropy(const ContextProfile& profile);

// Same keep rule the trainer uses, drawn from a generator seeded by `seed`.
// For sensitivity runs that measure entropy on the subsampled stream.
EncodedCorpus subsample_corpus(const EncodedCorpus& corpus, const Vocabulary& vocab,
                               double threshold, std::uint64_t seed);

struct EntropyRecord {
  std::int32_t token = 0;
  std::uint64_t frequency = 0;
  std::size_t distinct_contexts = 0;
  std::optional<double> entropy;
};

std::vector<EntropyRecord> entropy_records(const std::vector<ContextProfile>& profiles,
                                           const Vocabulary& vocab);

// `token,frequency,distinct_contexts,normalized_entropy`; empty profiles
// print NA.
void write_entropy_csv(std::ostream& out, const std::vector<EntropyRecord>& records,
                       const Vocabulary& vocab);

}  // namespace embstab

#endif  // EMBSTAB_NOISINESS_H_
