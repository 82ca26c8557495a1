// embedding_io.h
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
// Embedding text files and their metadata sidecars.
//
//   <name>.vec            first line "V dim", then "token v_1 ... v_dim"
//   <name>.vec.meta.json  seed, hyperparams, vocab fingerprint, determinism
//                         flag and the hash of the run manifest

#ifndef EMBSTAB_EMBEDDING_IO_H_
#define EMBSTAB_EMBEDDING_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "embstab/sgns.h"

namespace embstab {

nlohmann::json hyperparams_to_json(const Hyperparams& params);
// Missing keys keep the values of `base`; unknown keys are an InputError.
Hyperparams hyperparams_from_json(const nlohmann::json& j, const Hyperparams& base = {});

void write_vectors(std::ostream& out, const EmbeddingSpace& space);
// Fills tokens and input vectors only.
EmbeddingSpace read_vectors(std::istream& in);

std::filesystem::path metadata_path(const std::filesystem::path& vectors);

void save_space(const std::filesystem::path& path, const EmbeddingSpace& space,
                const std::string& manifest_hash);
// Throws InputError if either file is missing or malformed.
EmbeddingSpace load_space(const std::filesystem::path& path);

}  // namespace embstab

#endif  // EMBSTAB_EMBEDDING_IO_H_
