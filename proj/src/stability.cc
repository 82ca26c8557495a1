// stability.cc
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

#include "embstab/stability.h"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "embstab/errors.h"
#include "embstab/format.h"
#include "embstab/parallel.h"

namespace embstab {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;

constexpr std::size_t kQueryBlock = 64;

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.index < b.index;
}

}  // namespace

CandidateMask candidate_mask(const std::vector<std::string>& tokens,
                             const std::set<std::string>& allowed) {
  CandidateMask mask(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) mask[i] = allowed.count(tokens[i]) > 0;
  return mask;
}

NeighborIndex::NeighborIndex(const EmbeddingSpace& space) : NeighborIndex(space.input) {}

NeighborIndex::NeighborIndex(const Matrix& vectors) : unit_(vectors) {
  for (std::size_t r = 0; r < unit_.rows(); ++r) {
    auto row = unit_.row(r);
    double norm = 0.0;
    for (double x : row) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : row) x /= norm;
    }
  }
}

std::vector<NeighborList> NeighborIndex::query(std::span<const std::int32_t> queries, std::size_t n,
                                               const CandidateMask& candidates,
                                               std::size_t jobs) const {
  if (n < 1) throw InputError("number of neighbors must be >= 1");
  const std::size_t rows = unit_.rows();
  if (!candidates.empty() && candidates.size() != rows) {
    throw InputError("candidate mask size does not match the space");
  }
  for (std::int32_t q : queries) {
    if (q < 0 || static_cast<std::size_t>(q) >= rows) throw InputError("query token out of range");
  }

  std::vector<NeighborList> out(queries.size());
  if (rows == 0 || queries.empty()) return out;
  const ConstMap all(unit_.data().data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(unit_.cols()));
  const std::size_t blocks = (queries.size() + kQueryBlock - 1) / kQueryBlock;

  parallel_for(blocks, jobs, [&](std::size_t block) {
    const std::size_t begin = block * kQueryBlock;
    const std::size_t end = std::min(queries.size(), begin + kQueryBlock);
    RowMatrix q(static_cast<Eigen::Index>(end - begin), all.cols());
    for (std::size_t i = begin; i < end; ++i) q.row(static_cast<Eigen::Index>(i - begin)) = all.row(queries[i]);
    const RowMatrix scores = q * all.transpose();

    std::vector<Neighbor> pool;
    pool.reserve(rows);
    for (std::size_t i = begin; i < end; ++i) {
      const std::int32_t self = queries[i];
      pool.clear();
      const auto local = static_cast<Eigen::Index>(i - begin);
      for (std::size_t c = 0; c < rows; ++c) {
        if (static_cast<std::int32_t>(c) == self) continue;
        if (!candidates.empty() && !candidates[c]) continue;
        pool.push_back({static_cast<std::int32_t>(c), scores(local, static_cast<Eigen::Index>(c))});
      }
      const std::size_t k = std::min(n, pool.size());
      std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), ranks_before);
      out[i].token = self;
      out[i].neighbors.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
  });
  return out;
}

NeighborList NeighborIndex::query(std::int32_t token, std::size_t n,
                                  const CandidateMask& candidates) const {
  const std::int32_t q[] = {token};
  return std::move(query(q, n, candidates, 1).front());
}

NeighborList nearest_neighbors(const EmbeddingSpace& space, const std::string& token,
                               std::size_t n, const CandidateMask& candidates) {
  const auto it = std::find(space.tokens.begin(), space.tokens.end(), token);
  if (it == space.tokens.end()) throw InputError("token '" + token + "' not in embedding space");
  return NeighborIndex(space).query(static_cast<std::int32_t>(it - space.tokens.begin()), n, candidates);
}

void check_comparable(std::span<const EmbeddingSpace> spaces) {
  if (spaces.size() < 2) throw InputError("stability needs at least two spaces");
  const EmbeddingSpace& first = spaces.front();
  for (const EmbeddingSpace& s : spaces.subspan(1)) {
    if (s.vocab_fingerprint != first.vocab_fingerprint) throw IncomparableError("vocabulary fingerprints differ");
    if (s.size() != first.size() || s.tokens != first.tokens) throw IncomparableError("token rows differ");
  }
}

double intersection_ratio(std::span<const NeighborList> lists, std::size_t* overlap) {
  if (lists.empty()) return 0.0;
  auto sorted_ids = [](const NeighborList& l) {
    std::vector<std::int32_t> ids;
    ids.reserve(l.neighbors.size());
    for (const Neighbor& nb : l.neighbors) ids.push_back(nb.index);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  const std::size_t list_size = lists.front().neighbors.size();
  std::vector<std::int32_t> common = sorted_ids(lists.front());
  for (const NeighborList& l : lists.subspan(1)) {
    const auto ids = sorted_ids(l);
    std::vector<std::int32_t> next;
    std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (overlap) *overlap = common.size();
  return list_size == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(list_size);
}

StabilityRecord stability(const std::string& token, std::span<const EmbeddingSpace> spaces,
                          const StabilityOptions& options) {
  check_comparable(spaces);
  const auto& tokens = spaces.front().tokens;
  const auto it = std::find(tokens.begin(), tokens.end(), token);
  if (it == tokens.end()) throw InputError("token '" + token + "' not in embedding space");
  StabilityOptions one = options;
  one.keep_neighbors = true;
  auto report = stability_report(spaces, {static_cast<std::int32_t>(it - tokens.begin())}, one);
  StabilityRecord record = std::move(report.records.front());
  if (!options.keep_neighbors) record.neighbors.clear();
  return record;
}

StabilityReport stability_report(std::span<const EmbeddingSpace> spaces,
                                 std::vector<std::int32_t> tokens,
                                 const StabilityOptions& options) {
  check_comparable(spaces);
  StabilityReport report;
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  if (tokens.empty()) {
    report.warnings.push_back("token filter selected no tokens; report is empty");
    return report;
  }

  std::vector<std::vector<NeighborList>> per_space;
  per_space.reserve(spaces.size());
  for (const EmbeddingSpace& space : spaces) {
    per_space.push_back(NeighborIndex(space).query(tokens, options.n, options.candidates, options.jobs));
  }

  report.records.resize(tokens.size());
  std::vector<NeighborList> lists(spaces.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    for (std::size_t s = 0; s < spaces.size(); ++s) lists[s] = std::move(per_space[s][t]);
    StabilityRecord& r = report.records[t];
    r.token = tokens[t];
    r.list_size = lists.front().neighbors.size();
    r.stability = intersection_ratio(lists, &r.overlap);
    if (options.keep_neighbors) r.neighbors = lists;
  }
  return report;
}

void write_stability_csv(std::ostream& out, const StabilityReport& report, const Vocabulary& vocab) {
  out << "token,frequency,stability\n";
  for (const StabilityRecord& r : report.records) {
    const auto i = static_cast<std::size_t>(r.token);
    out << csv_field(vocab.token(i)) << ',' << vocab.frequency(i) << ',' << format_exact(r.stability) << '\n';
  }
}

void write_neighbor_dump(std::ostream& out, const StabilityReport& report, const Vocabulary& vocab) {
  out << "token,space,rank,neighbor,cosine\n";
  for (const StabilityRecord& r : report.records) {
    for (std::size_t s = 0; s < r.neighbors.size(); ++s) {
      const auto& list = r.neighbors[s].neighbors;
      for (std::size_t k = 0; k < list.size(); ++k) {
        out << csv_field(vocab.token(static_cast<std::size_t>(r.token))) << ',' << s << ',' << k + 1 << ','
            << csv_field(vocab.token(static_cast<std::size_t>(list[k].index))) << ',' << format_exact(list[k].score)
            << '\n';
      }
    }
  }
}

}  // namespace embstab
