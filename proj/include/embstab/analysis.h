// analysis.h
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
// Joining per-token stability, frequency and entropy; Pearson correlation
// with a t-test p-value; group filters; frequency x stability heatmaps.

#ifndef EMBSTAB_ANALYSIS_H_
#define EMBSTAB_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/noisiness.h"
#include "embstab/stability.h"

namespace embstab {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation. a, b > 0 and 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct CorrelationResult {
  double rho = 0.0;
  std::size_t n = 0;
  double p_value = 1.0;
};

// Product-moment correlation; p-value from t = rho sqrt((n-2)/(1-rho^2)).
// Throws InputError for mismatched lengths or n < 3, DegenerateSeriesError
// when either series has zero variance.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

inline constexpr std::uint64_t kDefaultLowFrequency = 100;

struct JoinedRecord {
  std::int32_t token = 0;
  std::string name;
  std::uint64_t frequency = 0;
  double stability = 0.0;
  std::optional<double> entropy;  // nullopt: no context
  std::size_t distinct_contexts = 0;
  bool low_freq = false;  // frequency < low-frequency threshold
  bool common = false;    // listed in the user's common-concept file
};

// One record per stability record, in the same order. `entropy` is indexed
// by token.
std::vector<JoinedRecord> join_records(const StabilityReport& stability,
                                       const std::vector<EntropyRecord>& entropy,
                                       const Vocabulary& vocab,
                                       const std::set<std::string>& common = {},
                                       std::uint64_t low_freq_threshold = kDefaultLowFrequency);

using RecordFilter = std::function<bool(const JoinedRecord&)>;

RecordFilter all_records();
RecordFilter low_freq_records();
RecordFilter common_records();
RecordFilter both(RecordFilter a, RecordFilter b);

std::vector<JoinedRecord> filter_records(std::span<const JoinedRecord> records,
                                         const RecordFilter& keep);

// Records without an entropy value are skipped.
CorrelationResult correlate_entropy_stability(std::span<const JoinedRecord> records,
                                              const RecordFilter& keep = all_records());
CorrelationResult correlate_frequency_stability(std::span<const JoinedRecord> records,
                                                const RecordFilter& keep = all_records());

struct HeatmapGrid {
  std::vector<double> frequency_edges;
  std::vector<double> stability_edges;
  // counts[f][s]: frequency bin f, stability bin s.
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const;
};

// min_count, then the powers of ten above it up to 10000, then infinity.
std::vector<double> default_frequency_edges(std::uint64_t min_count = 5);
// 0.0, 0.1, ..., 1.0
std::vector<double> default_stability_edges();

// Half-open bins, last bin closed; values beyond the outer edges clamp into
// the end bins. Throws InputError unless both edge lists are strictly
// increasing with at least two entries and the stability edges cover [0, 1].
HeatmapGrid bin_heatmap(std::span<const JoinedRecord> records,
                        const std::vector<double>& frequency_edges,
                        const std::vector<double>& stability_edges);

void write_joined_csv(std::ostream& out, std::span<const JoinedRecord> records);
std::vector<JoinedRecord> read_joined_csv(std::istream& in);

// Correlation table: measure (entropy or frequency against stability) x
// group (all, low_freq, low_freq_common). Groups that cannot be computed
// carry a status message instead of numbers.
struct CorrelationRow {
  std::string measure;
  std::string group;
  std::optional<CorrelationResult> result;
  std::string status = "ok";
};

std::vector<CorrelationRow> correlation_table(std::span<const JoinedRecord> records,
                                              bool have_common_list);
void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRow>& rows);

// Grid layout: one row per frequency bin, one column per stability bin.
void write_heatmap_grid_csv(std::ostream& out, const HeatmapGrid& grid);
// Long layout: `freq_bin,stab_bin,count`.
void write_heatmap_long_csv(std::ostream& out, const HeatmapGrid& grid);

}  // namespace embstab

#endif  // EMBSTAB_ANALYSIS_H_
