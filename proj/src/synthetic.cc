// synthetic.cc
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

#include "embstab/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "embstab/errors.h"
#include "embstab/sgns.h"

namespace embstab {
namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
  return buf;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.groups * spec.group_size + spec.noisy_targets == 0 || spec.filler_words == 0 ||
      spec.template_words == 0 || spec.min_sentences == 0 || spec.max_sentences < spec.min_sentences) {
    throw InputError("invalid synthetic corpus settings");
  }
  Rng rng(spec.seed, 0);

  auto tagged_word = [&](const std::string& word, const std::string& id, bool tag) {
    return tag ? "[" + word + "|" + id + "]" : word;
  };
  std::vector<std::string> filler(spec.filler_words);
  for (std::size_t i = 0; i < filler.size(); ++i) {
    filler[i] = tagged_word(numbered("filler", i), numbered("F", i), spec.tag_context_words && i % 5 == 0);
  }
  std::vector<std::vector<std::string>> templates(spec.groups);
  for (std::size_t g = 0; g < spec.groups; ++g) {
    for (std::size_t t = 0; t < spec.template_words; ++t) {
      const std::size_t id = g * spec.template_words + t;
      templates[g].push_back(tagged_word(numbered("topic", id), numbered("P", id), spec.tag_context_words));
    }
  }

  struct Target {
    std::string markup;
    std::ptrdiff_t group;  // -1: noisy
  };
  std::vector<Target> targets;
  SyntheticCorpus out;
  std::size_t next_id = 0;
  for (std::size_t g = 0; g < spec.groups; ++g) {
    for (std::size_t i = 0; i < spec.group_size; ++i, ++next_id) {
      const std::string id = numbered("C", next_id);
      targets.push_back({"[target " + std::to_string(next_id) + "|" + id + "]", static_cast<std::ptrdiff_t>(g)});
      out.coherent.insert(id);
    }
  }
  for (std::size_t i = 0; i < spec.noisy_targets; ++i, ++next_id) {
    const std::string id = numbered("C", next_id);
    targets.push_back({"[target " + std::to_string(next_id) + "|" + id + "]", -1});
    out.noisy.insert(id);
  }

  // Zipf-like weights inside each template keep coherent contexts skewed.
  std::vector<double> template_cdf(spec.template_words);
  double acc = 0.0;
  for (std::size_t t = 0; t < spec.template_words; ++t) template_cdf[t] = acc += 1.0 / static_cast<double>(t + 1);
  for (double& c : template_cdf) c /= acc;

  std::vector<std::string> lines;
  for (const Target& target : targets) {
    const std::size_t count =
        spec.min_sentences + rng.below(spec.max_sentences - spec.min_sentences + 1);
    for (std::size_t s = 0; s < count; ++s) {
      std::vector<std::string> words;
      words.reserve(spec.context_length + 1);
      for (std::size_t w = 0; w < spec.context_length; ++w) {
        if (target.group >= 0 && rng.uniform() < spec.template_share) {
          const double u = rng.uniform();
          const auto t = static_cast<std::size_t>(
              std::lower_bound(template_cdf.begin(), template_cdf.end(), u) - template_cdf.begin());
          words.push_back(templates[static_cast<std::size_t>(target.group)][std::min(t, spec.template_words - 1)]);
        } else {
          words.push_back(filler[rng.below(filler.size())]);
        }
      }
      const auto at = static_cast<std::ptrdiff_t>(rng.below(words.size() + 1));
      words.insert(words.begin() + at, target.markup);
      std::string line;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w) line += ' ';
        line += words[w];
      }
      lines.push_back(std::move(line));
    }
  }

  // Fisher-Yates with the portable generator.
  for (std::size_t i = lines.size(); i > 1; --i) std::swap(lines[i - 1], lines[rng.below(i)]);
  for (const auto& l : lines) {
    out.text += l;
    out.text += '\n';
  }
  out.sentences = lines.size();
  return out;
}

}  // namespace embstab
