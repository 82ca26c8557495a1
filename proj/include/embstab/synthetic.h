// synthetic.h
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
// Generator for concept-tagged fixture corpora with a known answer: half of
// the target concepts appear in coherent, group-specific contexts and half
// in contexts drawn uniformly from a broad filler vocabulary. Coherent
// targets should come out stable with low context entropy, noisy ones
// unstable with high entropy.

#ifndef EMBSTAB_SYNTHETIC_H_
#define EMBSTAB_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>

namespace embstab {

struct SyntheticSpec {
  std::size_t groups = 5;            // coherent topic groups
  std::size_t group_size = 11;       // targets per group
  std::size_t noisy_targets = 55;
  std::size_t template_words = 6;    // context vocabulary per group
  std::size_t filler_words = 500;
  double template_share = 0.8;       // chance a coherent context word is from the template
  std::size_t context_length = 10;   // words per sentence besides the target
  std::size_t min_sentences = 8;     // per target, drawn uniformly
  std::size_t max_sentences = 28;
  // Also tag template words and every fifth filler word as concepts, so the
  // NLM transformation keeps more than the target.
  bool tag_context_words = false;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::string text;  // tagged, one sentence per line
  std::set<std::string> coherent;  // target concept ids
  std::set<std::string> noisy;
  std::size_t sentences = 0;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace embstab

#endif  // EMBSTAB_SYNTHETIC_H_
