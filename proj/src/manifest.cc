// manifest.cc
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

#include "embstab/manifest.h"

#include <fstream>

#include "embstab/embedding_io.h"
#include "embstab/errors.h"
#include "embstab/hashing.h"

namespace embstab {

using nlohmann::json;

json RunManifest::to_json() const {
  return json{{"command", command},
              {"corpus", {{"path", corpus_path}, {"sha256", corpus_hash}}},
              {"mode", std::string(mode_name(mode))},
              {"hyperparams", hyperparams_to_json(hyperparams)},
              {"seeds", seeds},
              {"output_dir", output_dir},
              {"tool_version", tool_version},
              {"extra", extra}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.corpus_path = j.at("corpus").at("path").get<std::string>();
    m.corpus_hash = j.at("corpus").at("sha256").get<std::string>();
    m.mode = parse_mode(j.at("mode").get<std::string>());
    m.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.output_dir = j.at("output_dir").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.extra = j.value("extra", json::object());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string RunManifest::hash() const { return sha256_hex(to_json().dump()); }

std::string RunManifest::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw InputError("cannot write " + (dir / "manifest.json").string());
  json j = to_json();
  j["manifest_hash"] = hash();
  out << j.dump(2) << '\n';
  return j["manifest_hash"].get<std::string>();
}

RunManifest RunManifest::read(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open manifest " + file.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InputError("malformed manifest " + file.string() + ": " + e.what());
  }
}

}  // namespace embstab
