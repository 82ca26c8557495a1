// gen_synthetic.cc
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
// Writes a tagged fixture corpus plus coherent / noisy id lists.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "embstab/synthetic.h"

namespace {

void write_ids(const std::string& path, const std::set<std::string>& ids) {
  std::ofstream out(path);
  for (const auto& id : ids) out << id << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  embstab::SyntheticSpec spec;
  std::string output;
  CLI::App app{"Generate a synthetic concept-tagged corpus"};
  app.add_option("-o,--output", output, "Tagged text file")->required();
  app.add_option("--groups", spec.groups)->capture_default_str();
  app.add_option("--group-size", spec.group_size)->capture_default_str();
  app.add_option("--noisy", spec.noisy_targets)->capture_default_str();
  app.add_option("--template-words", spec.template_words)->capture_default_str();
  app.add_option("--filler", spec.filler_words)->capture_default_str();
  app.add_option("--template-share", spec.template_share)->capture_default_str();
  app.add_option("--context-length", spec.context_length)->capture_default_str();
  app.add_option("--min-sentences", spec.min_sentences)->capture_default_str();
  app.add_option("--max-sentences", spec.max_sentences)->capture_default_str();
  app.add_flag("--tag-context-words", spec.tag_context_words);
  app.add_option("--seed", spec.seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = embstab::generate_synthetic_corpus(spec);
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << output << '\n';
      return 2;
    }
    out << corpus.text;
    write_ids(output + ".coherent", corpus.coherent);
    write_ids(output + ".noisy", corpus.noisy);
    std::cerr << corpus.sentences << " sentences\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
