// sweep.cc
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

#include "embstab/sweep.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

#include "embstab/embedding_io.h"
#include "embstab/errors.h"
#include "embstab/format.h"
#include "embstab/hashing.h"
#include "embstab/manifest.h"
#include "embstab/noisiness.h"
#include "embstab/parallel.h"
#include "embstab/stability.h"

namespace embstab {
namespace {

using nlohmann::json;

constexpr Axis kAxisOrder[] = {Axis::kWindow, Axis::kEpochs, Axis::kNegatives, Axis::kSmoothing,
                               Axis::kSubsample};

int integral_value(Axis axis, double value) {
  if (std::floor(value) != value || std::fabs(value) > 1e9) {
    throw InputError(std::string("axis ") + axis_letter(axis) + " needs integer values, got " +
                     format_number(value));
  }
  return static_cast<int>(value);
}

std::string run_directory_name(const Hyperparams& params) {
  std::string label = params.label();
  for (char& c : label) {
    if (c == ':') c = '_';
  }
  return label + "-d" + std::to_string(params.dim) + "-" +
         sha256_hex(hyperparams_to_json(params).dump()).substr(0, 8);
}

// Corpus-side state shared by every row of one mode.
struct ModeData {
  Mode mode = Mode::kCui2vec;
  Vocabulary vocab;
  EncodedCorpus encoded;
  CandidateMask candidates;
  std::vector<std::int32_t> evaluated;
};

ModeData prepare_mode(const std::vector<TaggedSentence>& corpus, Mode mode,
                      const SweepConfig& config) {
  ModeData data;
  data.mode = mode;
  TokenCorpus tokens = transform_corpus(corpus, mode);
  if (tokens.sentences.empty()) {
    throw InputError(std::string("corpus is empty in ") + std::string(mode_name(mode)) + " mode");
  }
  data.vocab = build_vocab(tokens, config.base.min_count, config.jobs).vocabulary;
  data.encoded = encode(tokens.sentences, data.vocab);
  if (mode != Mode::kWords && config.concept_neighbors_only) {
    data.candidates = candidate_mask(
        [&] {
          std::vector<std::string> names;
          for (const auto& e : data.vocab.entries()) names.push_back(e.token);
          return names;
        }(),
        tokens.concepts);
    for (std::size_t i = 0; i < data.candidates.size(); ++i) {
      if (data.candidates[i]) data.evaluated.push_back(static_cast<std::int32_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < data.vocab.size(); ++i) data.evaluated.push_back(static_cast<std::int32_t>(i));
  }
  return data;
}

bool reusable(const std::filesystem::path& path, const Hyperparams& params, std::uint64_t seed,
              const std::string& fingerprint, EmbeddingSpace& out) {
  if (!std::filesystem::exists(metadata_path(path))) return false;
  try {
    EmbeddingSpace space = load_space(path);
    if (!(space.hyperparams == params) || space.seed != seed || space.vocab_fingerprint != fingerprint ||
        !space.deterministic) {
      return false;
    }
    out = std::move(space);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

}  // namespace

char axis_letter(Axis axis) {
  switch (axis) {
    case Axis::kWindow:
      return 'W';
    case Axis::kEpochs:
      return 'E';
    case Axis::kNegatives:
      return 'N';
    case Axis::kSmoothing:
      return 'M';
    case Axis::kSubsample:
      return 'S';
  }
  return '?';
}

Axis parse_axis(std::string_view letter) {
  for (Axis a : kAxisOrder) {
    if (letter.size() == 1 && letter[0] == axis_letter(a)) return a;
  }
  throw InputError("unknown sweep axis '" + std::string(letter) + "' (expected W, E, N, M or S)");
}

std::string axis_title(Axis axis) {
  switch (axis) {
    case Axis::kWindow:
      return "Window size (W)";
    case Axis::kEpochs:
      return "Epoch (E)";
    case Axis::kNegatives:
      return "Number of NS (N)";
    case Axis::kSmoothing:
      return "Smoothing (M)";
    case Axis::kSubsample:
      return "Subsampling rate (S)";
  }
  return "?";
}

Hyperparams apply_axis(const Hyperparams& base, Axis axis, double value) {
  Hyperparams p = base;
  switch (axis) {
    case Axis::kWindow:
      p.window = integral_value(axis, value);
      break;
    case Axis::kEpochs:
      p.epochs = integral_value(axis, value);
      break;
    case Axis::kNegatives:
      p.negatives = integral_value(axis, value);
      break;
    case Axis::kSmoothing:
      p.smoothing = value;
      break;
    case Axis::kSubsample:
      p.subsample = value;
      break;
  }
  return p;
}

SweepConfig parse_sweep_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("sweep config must be a JSON object");
  SweepConfig config;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  try {
    std::map<Axis, std::vector<double>> axes;
    bool have_corpus = false;
    for (const auto& [key, value] : j.items()) {
      if (key == "corpus") {
        config.corpus = resolve(value.get<std::string>());
        have_corpus = true;
      } else if (key == "modes") {
        config.modes.clear();
        for (const auto& m : value) config.modes.push_back(parse_mode(m.get<std::string>()));
      } else if (key == "base") {
        config.base = hyperparams_from_json(value);
      } else if (key == "axes") {
        if (!value.is_object()) throw InputError("'axes' must map axis letters to value lists");
        for (const auto& [letter, values] : value.items()) {
          const Axis axis = parse_axis(letter);
          auto list = values.get<std::vector<double>>();
          if (list.empty()) throw InputError("axis " + letter + " has an empty values list");
          axes[axis] = std::move(list);
        }
      } else if (key == "seeds") {
        config.seeds = value.get<std::vector<std::uint64_t>>();
      } else if (key == "neighbors") {
        config.neighbors = value.get<std::size_t>();
      } else if (key == "concept_neighbors_only") {
        config.concept_neighbors_only = value.get<bool>();
      } else if (key == "jobs") {
        config.jobs = value.get<std::size_t>();
      } else if (key == "output") {
        config.output = resolve(value.get<std::string>());
      } else {
        throw InputError("unknown sweep config key '" + key + "'");
      }
    }
    if (!have_corpus) throw InputError("sweep config needs 'corpus'");
    for (Axis a : kAxisOrder) {
      if (auto it = axes.find(a); it != axes.end()) config.axes.push_back({a, it->second});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed sweep config: ") + e.what());
  }
  if (config.modes.empty()) throw InputError("sweep config needs at least one mode");
  if (config.seeds.size() < 2) throw InputError("sweep needs at least two seeds");
  if (config.neighbors < 1) throw InputError("neighbors must be >= 1");
  config.base.validate();
  for (const SweepRow& row : sweep_rows(config)) row.params.validate();
  return config;
}

SweepConfig load_sweep_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open sweep config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed sweep config " + file.string() + ": " + e.what());
  }
  return parse_sweep_config(j, file.parent_path());
}

std::vector<SweepRow> sweep_rows(const SweepConfig& config) {
  std::vector<SweepRow> rows;
  rows.push_back({"Default", "", config.base, {}});
  for (const SweepAxis& axis : config.axes) {
    for (double v : axis.values) {
      rows.push_back({axis_title(axis.axis), format_number(v), apply_axis(config.base, axis.axis, v), {}});
    }
  }
  return rows;
}

SweepReport run_sweep(const std::vector<TaggedSentence>& corpus, const SweepConfig& config) {
  SweepReport report;
  report.modes = config.modes;
  report.rows = sweep_rows(config);

  // Rows with identical hyperparameters share their trained spaces.
  std::vector<Hyperparams> unique;
  std::vector<std::size_t> row_params;
  for (const SweepRow& row : report.rows) {
    row.params.validate();
    auto it = std::find(unique.begin(), unique.end(), row.params);
    row_params.push_back(static_cast<std::size_t>(it - unique.begin()));
    if (it == unique.end()) unique.push_back(row.params);
  }

  std::vector<ModeData> modes;
  for (Mode m : config.modes) modes.push_back(prepare_mode(corpus, m, config));

  std::string manifest_hash;
  if (!config.output.empty()) {
    RunManifest manifest;
    manifest.command = "sweep";
    manifest.corpus_path = config.corpus.string();
    manifest.corpus_hash = std::filesystem::exists(config.corpus) ? sha256_file(config.corpus) : "";
    manifest.mode = config.modes.front();
    manifest.hyperparams = config.base;
    manifest.seeds = config.seeds;
    manifest.output_dir = config.output.string();
    json axes = json::object();
    for (const SweepAxis& a : config.axes) axes[std::string(1, axis_letter(a.axis))] = a.values;
    json mode_names = json::array();
    for (Mode m : config.modes) mode_names.push_back(std::string(mode_name(m)));
    manifest.extra = {{"axes", axes}, {"modes", mode_names}, {"neighbors", config.neighbors},
                      {"concept_neighbors_only", config.concept_neighbors_only}};
    manifest_hash = manifest.write(config.output);
  }

  const std::size_t k = config.seeds.size();
  std::vector<std::vector<std::vector<EmbeddingSpace>>> spaces(
      modes.size(), std::vector<std::vector<EmbeddingSpace>>(unique.size(), std::vector<EmbeddingSpace>(k)));
  std::atomic<std::size_t> trained{0}, reused{0};
  const std::size_t total_jobs = modes.size() * unique.size() * k;
  parallel_for(total_jobs, config.jobs, [&](std::size_t job) {
    const std::size_t m = job / (unique.size() * k);
    const std::size_t p = (job / k) % unique.size();
    const std::size_t s = job % k;
    const Hyperparams& params = unique[p];
    const std::uint64_t seed = config.seeds[s];
    std::filesystem::path path;
    if (!config.output.empty()) {
      path = config.output / "runs" / std::string(mode_name(modes[m].mode)) / run_directory_name(params) /
             ("space_" + std::to_string(s) + "_seed_" + std::to_string(seed) + ".vec");
      if (reusable(path, params, seed, modes[m].vocab.fingerprint(), spaces[m][p][s])) {
        ++reused;
        return;
      }
    }
    spaces[m][p][s] = train(modes[m].encoded, modes[m].vocab, params, seed).space;
    spaces[m][p][s].output = Matrix();
    if (!path.empty()) save_space(path, spaces[m][p][s], manifest_hash);
    ++trained;
  });
  report.trained = trained;
  report.reused = reused;

  for (std::size_t m = 0; m < modes.size(); ++m) {
    std::map<int, std::vector<EntropyRecord>> entropy_by_window;
    std::vector<SweepCell> by_params(unique.size());
    for (std::size_t p = 0; p < unique.size(); ++p) {
      const int w = unique[p].window;
      if (!entropy_by_window.count(w)) {
        entropy_by_window[w] = entropy_records(
            collect_context_profiles(modes[m].encoded, modes[m].vocab.size(), w, config.jobs), modes[m].vocab);
      }
      StabilityOptions options;
      options.n = config.neighbors;
      options.candidates = modes[m].candidates;
      options.jobs = config.jobs;
      const auto stab = stability_report(spaces[m][p], modes[m].evaluated, options);
      const auto records = join_records(stab, entropy_by_window[w], modes[m].vocab);

      SweepCell& cell = by_params[p];
      cell.tokens = records.size();
      if (!records.empty()) {
        double sum = 0.0;
        for (const auto& r : records) sum += r.stability;
        cell.mean = sum / static_cast<double>(records.size());
        double var = 0.0;
        for (const auto& r : records) var += (r.stability - cell.mean) * (r.stability - cell.mean);
        cell.stdev = std::sqrt(var / static_cast<double>(records.size()));
      }
      try {
        cell.rho = correlate_entropy_stability(records);
      } catch (const DegenerateSeriesError& e) {
        cell.status = e.what();
      } catch (const InputError& e) {
        cell.status = e.what();
      }
    }
    for (std::size_t r = 0; r < report.rows.size(); ++r) report.rows[r].cells.push_back(by_params[row_params[r]]);
  }
  return report;
}

void write_sweep_report(const std::filesystem::path& dir, const SweepReport& report) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    return out;
  };

  std::ofstream t3 = open("table3.csv");
  std::ofstream t4 = open("table4.csv");
  std::ofstream longf = open("sweep_long.csv");
  t3 << "parameter,value,W:E:N:M:S";
  t4 << "parameter,value,W:E:N:M:S";
  for (Mode m : report.modes) {
    t3 << ',' << mode_name(m) << "_mean," << mode_name(m) << "_stdev";
    t4 << ',' << mode_name(m) << "_rho";
  }
  t3 << '\n';
  t4 << '\n';
  longf << "mode,parameter,value,W:E:N:M:S,tokens,mean,stdev,rho,p_value,status\n";

  for (const SweepRow& row : report.rows) {
    const std::string prefix = csv_field(row.parameter) + ',' + row.value + ',' + row.params.label();
    t3 << prefix;
    t4 << prefix;
    for (std::size_t m = 0; m < report.modes.size(); ++m) {
      const SweepCell& c = row.cells[m];
      t3 << ',' << format_exact(c.mean) << ',' << format_exact(c.stdev);
      t4 << ',' << (c.rho ? format_exact(c.rho->rho) : std::string("NA"));
      longf << mode_name(report.modes[m]) << ',' << prefix << ',' << c.tokens << ',' << format_exact(c.mean)
            << ',' << format_exact(c.stdev) << ',' << (c.rho ? format_exact(c.rho->rho) : std::string())
            << ',' << (c.rho ? format_exact(c.rho->p_value) : std::string()) << ',' << csv_field(c.status)
            << '\n';
    }
    t3 << '\n';
    t4 << '\n';
  }
}

}  // namespace embstab
