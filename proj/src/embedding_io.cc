// embedding_io.cc
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

#include "embstab/embedding_io.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "embstab/errors.h"
#include "embstab/format.h"

namespace embstab {

using nlohmann::json;

json hyperparams_to_json(const Hyperparams& p) {
  return json{{"dim", p.dim},
              {"window", p.window},
              {"epochs", p.epochs},
              {"negatives", p.negatives},
              {"smoothing", p.smoothing},
              {"subsample", p.subsample},
              {"min_count", p.min_count},
              {"initial_lr", p.initial_lr},
              {"final_lr", p.final_lr},
              {"fixed_window", p.fixed_window}};
}

Hyperparams hyperparams_from_json(const json& j, const Hyperparams& base) {
  if (!j.is_object()) throw InputError("hyperparameters must be a JSON object");
  Hyperparams p = base;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "dim") p.dim = value.get<int>();
      else if (key == "window" || key == "W") p.window = value.get<int>();
      else if (key == "epochs" || key == "E") p.epochs = value.get<int>();
      else if (key == "negatives" || key == "N") p.negatives = value.get<int>();
      else if (key == "smoothing" || key == "M") p.smoothing = value.get<double>();
      else if (key == "subsample" || key == "S") p.subsample = value.get<double>();
      else if (key == "min_count") p.min_count = value.get<std::uint64_t>();
      else if (key == "initial_lr") p.initial_lr = value.get<double>();
      else if (key == "final_lr") p.final_lr = value.get<double>();
      else if (key == "fixed_window") p.fixed_window = value.get<bool>();
      else throw InputError("unknown hyperparameter '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad hyperparameter value: ") + e.what());
  }
  return p;
}

void write_vectors(std::ostream& out, const EmbeddingSpace& space) {
  out << space.size() << ' ' << space.dim() << '\n';
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.tokens[i];
    for (double x : space.input.row(i)) out << ' ' << format_exact(x);
    out << '\n';
  }
}

EmbeddingSpace read_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty embedding file");
  std::istringstream header(line);
  std::size_t rows = 0, cols = 0;
  if (!(header >> rows >> cols) || cols == 0) throw ParseError(1, "expected header 'V dim'");

  EmbeddingSpace space;
  space.tokens.reserve(rows);
  space.input.resize(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParseError(r + 2, "truncated embedding file");
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    auto row = space.input.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      std::string value;
      if (!(fields >> value)) throw ParseError(r + 2, "expected " + std::to_string(cols) + " components");
      row[c] = parse_double(value, "vector component on line " + std::to_string(r + 2));
      if (!std::isfinite(row[c])) throw ParseError(r + 2, "non-finite vector component");
    }
    std::string extra;
    if (fields >> extra) throw ParseError(r + 2, "too many components");
    space.tokens.push_back(std::move(token));
  }
  space.hyperparams.dim = static_cast<int>(cols);
  return space;
}

std::filesystem::path metadata_path(const std::filesystem::path& vectors) {
  return std::filesystem::path(vectors.string() + ".meta.json");
}

void save_space(const std::filesystem::path& path, const EmbeddingSpace& space,
                const std::string& manifest_hash) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // The sidecar is written last; a run interrupted mid-write leaves no
  // metadata and is never mistaken for a finished space.
  std::filesystem::remove(metadata_path(path));
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_vectors(out, space);
  }
  json meta{{"seed", space.seed},
            {"hyperparams", hyperparams_to_json(space.hyperparams)},
            {"vocab_fingerprint", space.vocab_fingerprint},
            {"deterministic", space.deterministic},
            {"manifest", manifest_hash}};
  std::ofstream out(metadata_path(path), std::ios::binary);
  if (!out) throw InputError("cannot write " + metadata_path(path).string());
  out << meta.dump(2) << '\n';
}

EmbeddingSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  EmbeddingSpace space = read_vectors(in);

  std::ifstream meta_in(metadata_path(path));
  if (!meta_in) throw InputError("missing metadata sidecar " + metadata_path(path).string());
  try {
    const json meta = json::parse(meta_in);
    space.seed = meta.at("seed").get<std::uint64_t>();
    space.hyperparams = hyperparams_from_json(meta.at("hyperparams"));
    space.vocab_fingerprint = meta.at("vocab_fingerprint").get<std::string>();
    space.deterministic = meta.at("deterministic").get<bool>();
  } catch (const json::exception& e) {
    throw InputError("malformed metadata " + metadata_path(path).string() + ": " + e.what());
  }
  if (static_cast<std::size_t>(space.hyperparams.dim) != space.dim()) {
    throw InputError("metadata dim disagrees with " + path.string());
  }
  return space;
}

}  // namespace embstab
