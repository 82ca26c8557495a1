// analysis.cc
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

#include "embstab/analysis.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "embstab/errors.h"
#include "embstab/format.h"

namespace embstab {
namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

std::string edge_label(double lo, double hi) {
  return format_number(lo) + "-" + format_number(hi);
}

std::size_t find_bin(const std::vector<double>& edges, double value) {
  const std::size_t bins = edges.size() - 1;
  if (!(value >= edges.front())) return 0;  // also catches NaN
  if (value >= edges.back()) return bins - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return std::min<std::size_t>(bins - 1, static_cast<std::size_t>(it - edges.begin()) - 1);
}

void check_edges(const std::vector<double>& edges, const char* what) {
  if (edges.size() < 2) throw InputError(std::string(what) + " edges need at least two values");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw InputError(std::string(what) + " edges must be strictly increasing");
  }
}

bool parse_flag(const std::string& s) { return s == "1" || s == "true"; }

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw InputError("degrees of freedom must be > 0");
  if (std::isinf(t)) return 0.0;
  const double p = regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return std::clamp(p, 0.0, 1.0);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson: series lengths differ");
  if (x.size() < 3) throw InputError("pearson: need at least 3 observations");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateSeriesError();

  CorrelationResult r;
  r.n = x.size();
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = n - 2.0;
  const double one_minus = 1.0 - r.rho * r.rho;
  r.p_value = one_minus <= 0.0
                  ? 0.0
                  : student_t_two_sided_p(r.rho * std::sqrt(df / one_minus), df);
  return r;
}

std::vector<JoinedRecord> join_records(const StabilityReport& stability,
                                       const std::vector<EntropyRecord>& entropy,
                                       const Vocabulary& vocab, const std::set<std::string>& common,
                                       std::uint64_t low_freq_threshold) {
  std::vector<JoinedRecord> out;
  out.reserve(stability.records.size());
  for (const StabilityRecord& s : stability.records) {
    const auto i = static_cast<std::size_t>(s.token);
    JoinedRecord r;
    r.token = s.token;
    r.name = vocab.token(i);
    r.frequency = vocab.frequency(i);
    r.stability = s.stability;
    if (i < entropy.size()) {
      r.entropy = entropy[i].entropy;
      r.distinct_contexts = entropy[i].distinct_contexts;
    }
    r.low_freq = r.frequency < low_freq_threshold;
    r.common = common.count(r.name) > 0;
    out.push_back(std::move(r));
  }
  return out;
}

RecordFilter all_records() {
  return [](const JoinedRecord&) { return true; };
}

RecordFilter low_freq_records() {
  return [](const JoinedRecord& r) { return r.low_freq; };
}

RecordFilter common_records() {
  return [](const JoinedRecord& r) { return r.common; };
}

RecordFilter both(RecordFilter a, RecordFilter b) {
  return [a = std::move(a), b = std::move(b)](const JoinedRecord& r) { return a(r) && b(r); };
}

std::vector<JoinedRecord> filter_records(std::span<const JoinedRecord> records,
                                         const RecordFilter& keep) {
  std::vector<JoinedRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), keep);
  return out;
}

CorrelationResult correlate_entropy_stability(std::span<const JoinedRecord> records,
                                              const RecordFilter& keep) {
  std::vector<double> h, s;
  for (const JoinedRecord& r : records) {
    if (!keep(r) || !r.entropy) continue;
    h.push_back(*r.entropy);
    s.push_back(r.stability);
  }
  return pearson(h, s);
}

CorrelationResult correlate_frequency_stability(std::span<const JoinedRecord> records,
                                                const RecordFilter& keep) {
  std::vector<double> f, s;
  for (const JoinedRecord& r : records) {
    if (!keep(r)) continue;
    f.push_back(static_cast<double>(r.frequency));
    s.push_back(r.stability);
  }
  return pearson(f, s);
}

std::uint64_t HeatmapGrid::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (std::uint64_t c : row) sum += c;
  }
  return sum;
}

std::vector<double> default_frequency_edges(std::uint64_t min_count) {
  std::vector<double> edges{static_cast<double>(min_count)};
  for (double p = 10.0; p <= 10000.0; p *= 10.0) {
    if (p > edges.back()) edges.push_back(p);
  }
  edges.push_back(std::numeric_limits<double>::infinity());
  return edges;
}

std::vector<double> default_stability_edges() {
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(i / 10.0);
  return edges;
}

HeatmapGrid bin_heatmap(std::span<const JoinedRecord> records,
                        const std::vector<double>& frequency_edges,
                        const std::vector<double>& stability_edges) {
  check_edges(frequency_edges, "frequency");
  check_edges(stability_edges, "stability");
  if (stability_edges.front() > 0.0 || stability_edges.back() < 1.0) {
    throw InputError("stability edges must cover [0, 1]");
  }
  HeatmapGrid grid{frequency_edges, stability_edges,
                   std::vector<std::vector<std::uint64_t>>(
                       frequency_edges.size() - 1, std::vector<std::uint64_t>(stability_edges.size() - 1))};
  for (const JoinedRecord& r : records) {
    ++grid.counts[find_bin(frequency_edges, static_cast<double>(r.frequency))]
                 [find_bin(stability_edges, r.stability)];
  }
  return grid;
}

void write_joined_csv(std::ostream& out, std::span<const JoinedRecord> records) {
  out << "token,frequency,stability,distinct_contexts,normalized_entropy,low_freq,common\n";
  for (const JoinedRecord& r : records) {
    out << csv_field(r.name) << ',' << r.frequency << ',' << format_exact(r.stability) << ','
        << r.distinct_contexts << ',' << (r.entropy ? format_exact(*r.entropy) : std::string("NA")) << ','
        << (r.low_freq ? 1 : 0) << ',' << (r.common ? 1 : 0) << '\n';
  }
}

std::vector<JoinedRecord> read_joined_csv(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty() || rows.front().size() != 7 || rows.front()[0] != "token") {
    throw InputError("joined CSV: unexpected header");
  }
  std::vector<JoinedRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 7) throw ParseError(i + 1, "joined CSV: expected 7 fields");
    JoinedRecord r;
    r.token = static_cast<std::int32_t>(i - 1);
    r.name = f[0];
    try {
      r.frequency = std::stoull(f[1]);
      r.distinct_contexts = std::stoull(f[3]);
    } catch (const std::exception&) {
      throw ParseError(i + 1, "joined CSV: malformed count");
    }
    r.stability = parse_double(f[2], "stability");
    if (f[4] != "NA") r.entropy = parse_double(f[4], "normalized_entropy");
    r.low_freq = parse_flag(f[5]);
    r.common = parse_flag(f[6]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CorrelationRow> correlation_table(std::span<const JoinedRecord> records,
                                              bool have_common_list) {
  struct Group {
    const char* name;
    RecordFilter filter;
    bool available;
  };
  const Group groups[] = {{"all", all_records(), true},
                          {"low_freq", low_freq_records(), true},
                          {"low_freq_common", both(low_freq_records(), common_records()), have_common_list}};
  using Measure = CorrelationResult (*)(std::span<const JoinedRecord>, const RecordFilter&);
  const std::pair<const char*, Measure> measures[] = {{"entropy", &correlate_entropy_stability},
                                                      {"frequency", &correlate_frequency_stability}};
  std::vector<CorrelationRow> rows;
  for (const auto& [measure, fn] : measures) {
    for (const Group& g : groups) {
      CorrelationRow row{measure, g.name, std::nullopt, "ok"};
      if (!g.available) {
        row.status = "no common-concept list";
      } else {
        try {
          row.result = fn(records, g.filter);
        } catch (const DegenerateSeriesError& e) {
          row.status = e.what();
        } catch (const InputError& e) {
          row.status = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRow>& rows) {
  out << "measure,group,n,rho,p_value,status\n";
  for (const CorrelationRow& r : rows) {
    out << r.measure << ',' << r.group << ',';
    if (r.result) {
      out << r.result->n << ',' << format_exact(r.result->rho) << ',' << format_exact(r.result->p_value);
    } else {
      out << ",,";
    }
    out << ',' << csv_field(r.status) << '\n';
  }
}

void write_heatmap_grid_csv(std::ostream& out, const HeatmapGrid& grid) {
  out << "freq_bin";
  for (std::size_t s = 0; s + 1 < grid.stability_edges.size(); ++s) {
    out << ',' << edge_label(grid.stability_edges[s], grid.stability_edges[s + 1]);
  }
  out << '\n';
  for (std::size_t f = 0; f < grid.counts.size(); ++f) {
    out << edge_label(grid.frequency_edges[f], grid.frequency_edges[f + 1]);
    for (std::uint64_t c : grid.counts[f]) out << ',' << c;
    out << '\n';
  }
}

void write_heatmap_long_csv(std::ostream& out, const HeatmapGrid& grid) {
  out << "freq_bin,stab_bin,count\n";
  for (std::size_t f = 0; f < grid.counts.size(); ++f) {
    for (std::size_t s = 0; s < grid.counts[f].size(); ++s) {
      out << edge_label(grid.frequency_edges[f], grid.frequency_edges[f + 1]) << ','
          << edge_label(grid.stability_edges[s], grid.stability_edges[s + 1]) << ','
          << grid.counts[f][s] << '\n';
    }
  }
}

}  // namespace embstab
