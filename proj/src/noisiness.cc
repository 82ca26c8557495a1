// noisiness.cc
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

#include "embstab/noisiness.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "embstab/errors.h"
#include "embstab/format.h"
#include "embstab/parallel.h"
#include "embstab/sgns.h"

namespace embstab {
namespace {

constexpr std::uint64_t kEntropySubsampleStream = 3000;

using CountMap = std::unordered_map<std::int32_t, std::uint64_t>;

}  // namespace

std::vector<ContextProfile> collect_context_profiles(const EncodedCorpus& corpus,
                                                     std::size_t vocab_size, int window,
                                                     std::size_t jobs) {
  if (window < 1) throw InputError("context window must be >= 1");
  jobs = std::max<std::size_t>(1, std::min(jobs, corpus.size()));
  const std::size_t step = corpus.empty() ? 1 : (corpus.size() + jobs - 1) / jobs;
  std::vector<std::vector<CountMap>> shards(jobs, std::vector<CountMap>(vocab_size));

  parallel_for(jobs, jobs, [&](std::size_t shard) {
    auto& counts = shards[shard];
    const std::size_t begin = shard * step;
    const std::size_t end = std::min(corpus.size(), begin + step);
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sentence = corpus[s];
      const auto n = static_cast<std::ptrdiff_t>(sentence.size());
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto& profile = counts[static_cast<std::size_t>(sentence[static_cast<std::size_t>(i)])];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j != i) ++profile[sentence[static_cast<std::size_t>(j)]];
        }
      }
    }
  });

  std::vector<ContextProfile> profiles(vocab_size);
  for (std::size_t t = 0; t < vocab_size; ++t) {
    CountMap merged = std::move(shards[0][t]);
    for (std::size_t s = 1; s < jobs; ++s) {
      for (const auto& [ctx, c] : shards[s][t]) merged[ctx] += c;
    }
    ContextProfile& p = profiles[t];
    p.token = static_cast<std::int32_t>(t);
    p.counts.assign(merged.begin(), merged.end());
    std::sort(p.counts.begin(), p.counts.end());
    for (const auto& [ctx, c] : p.counts) p.total += c;
  }
  return profiles;
}

std::optional<double> normalized_entropy(const ContextProfile& profile) {
  if (profile.empty()) return std::nullopt;
  if (profile.distinct() == 1) return 0.0;
  const std::uint64_t first = profile.counts.front().second;
  if (std::all_of(profile.counts.begin(), profile.counts.end(),
                  [&](const auto& kv) { return kv.second == first; })) {
    return 1.0;
  }
  // Per-element p = c / total keeps the result bit-identical under integer
  // scaling of every count.
  const double total = static_cast<double>(profile.total);
  double h = 0.0;
  for (const auto& [ctx, c] : profile.counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  h /= std::log(static_cast<double>(profile.distinct()));
  return std::clamp(h, 0.0, 1.0);
}

EncodedCorpus subsample_corpus(const EncodedCorpus& corpus, const Vocabulary& vocab,
                               double threshold, std::uint64_t seed) {
  const double retained = static_cast<double>(vocab.retained_tokens());
  Rng rng(seed, kEntropySubsampleStream);
  EncodedCorpus out;
  for (const auto& sentence : corpus) {
    std::vector<std::int32_t> kept;
    for (std::int32_t id : sentence) {
      const double f = static_cast<double>(vocab.frequency(static_cast<std::size_t>(id))) / retained;
      if (subsample_keep(f, threshold, rng)) kept.push_back(id);
    }
    if (!kept.empty()) out.push_back(std::move(kept));
  }
  return out;
}

std::vector<EntropyRecord> entropy_records(const std::vector<ContextProfile>& profiles,
                                           const Vocabulary& vocab) {
  std::vector<EntropyRecord> out;
  out.reserve(profiles.size());
  for (const ContextProfile& p : profiles) {
    out.push_back({p.token, vocab.frequency(static_cast<std::size_t>(p.token)), p.distinct(),
                   normalized_entropy(p)});
  }
  return out;
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyRecord>& records,
                       const Vocabulary& vocab) {
  out << "token,frequency,distinct_contexts,normalized_entropy\n";
  for (const EntropyRecord& r : records) {
    out << csv_field(vocab.token(static_cast<std::size_t>(r.token))) << ',' << r.frequency << ','
        << r.distinct_contexts << ',' << (r.entropy ? format_exact(*r.entropy) : std::string("NA"))
        << '\n';
  }
}

}  // namespace embstab
