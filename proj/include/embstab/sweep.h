// sweep.h
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
// One-axis-at-a-time hyperparameter sweeps. Each row trains k seeded spaces
// per corpus mode and reports mean / standard deviation of stability and the
// entropy-stability correlation. The row set is the default configuration
// followed by every (axis, value) pair with all other hyperparameters at the
// defaults.

#ifndef EMBSTAB_SWEEP_H_
#define EMBSTAB_SWEEP_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "embstab/analysis.h"
#include "embstab/corpus.h"
#include "embstab/sgns.h"

namespace embstab {

enum class Axis { kWindow, kEpochs, kNegatives, kSmoothing, kSubsample };

// "W", "E", "N", "M", "S"
char axis_letter(Axis axis);
Axis parse_axis(std::string_view letter);  // throws InputError
std::string axis_title(Axis axis);         // e.g. "Window size (W)"

struct SweepAxis {
  Axis axis = Axis::kWindow;
  std::vector<double> values;
};

struct SweepConfig {
  std::filesystem::path corpus;  // tagged text
  std::vector<Mode> modes{Mode::kCui2vec};
  Hyperparams base;
  std::vector<SweepAxis> axes;  // always in W, E, N, M, S order
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t neighbors = 10;
  bool concept_neighbors_only = true;
  std::size_t jobs = 1;
  std::filesystem::path output;  // empty: nothing cached on disk
};

// Relative corpus / output paths resolve against `base_dir`. Throws
// InputError on unknown keys, empty value lists, fewer than two seeds, or
// non-integral values on the W / E / N axes.
SweepConfig parse_sweep_config(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& file);

Hyperparams apply_axis(const Hyperparams& base, Axis axis, double value);

struct SweepCell {
  std::size_t tokens = 0;
  double mean = 0.0;
  double stdev = 0.0;  // population standard deviation
  std::optional<CorrelationResult> rho;
  std::string status = "ok";
};

struct SweepRow {
  std::string parameter;  // "Default" or the axis title
  std::string value;      // empty for the default row
  Hyperparams params;
  std::vector<SweepCell> cells;  // one per mode
};

struct SweepReport {
  std::vector<Mode> modes;
  std::vector<SweepRow> rows;
  std::size_t trained = 0;  // spaces trained by this invocation
  std::size_t reused = 0;   // spaces loaded from a previous invocation
};

// Enumerates rows without training anything.
std::vector<SweepRow> sweep_rows(const SweepConfig& config);

SweepReport run_sweep(const std::vector<TaggedSentence>& corpus, const SweepConfig& config);

// table3.csv (mean / stdev), table4.csv (rho) and sweep_long.csv.
void write_sweep_report(const std::filesystem::path& dir, const SweepReport& report);

}  // namespace embstab

#endif  // EMBSTAB_SWEEP_H_
