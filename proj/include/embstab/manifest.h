// manifest.h
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
// Run manifests: written before any other artifact of a run so every output
// can be traced back to its inputs by the manifest hash.

#ifndef EMBSTAB_MANIFEST_H_
#define EMBSTAB_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "embstab/corpus.h"
#include "embstab/sgns.h"

namespace embstab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string corpus_path;
  std::string corpus_hash;
  Mode mode = Mode::kWords;
  Hyperparams hyperparams;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  std::string tool_version = kToolVersion;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  // SHA-256 of the canonical JSON text.
  std::string hash() const;

  // Writes <dir>/manifest.json and returns hash().
  std::string write(const std::filesystem::path& dir) const;
  static RunManifest read(const std::filesystem::path& file);
};

}  // namespace embstab

#endif  // EMBSTAB_MANIFEST_H_
