// stability.h
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
// Exact cosine nearest neighbors and cross-space stability: the fraction of
// a token's n nearest neighbors shared by every one of k spaces.

#ifndef EMBSTAB_STABILITY_H_
#define EMBSTAB_STABILITY_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/matrix.h"
#include "embstab/sgns.h"

namespace embstab {

struct Neighbor {
  std::int32_t index = 0;
  double score = 0.0;  // cosine
  bool operator==(const Neighbor&) const = default;
};

struct NeighborList {
  std::int32_t token = 0;
  std::vector<Neighbor> neighbors;  // score descending, ties by index
};

// Which rows may appear as neighbors. Empty means every row.
using CandidateMask = std::vector<bool>;

CandidateMask candidate_mask(const std::vector<std::string>& tokens,
                             const std::set<std::string>& allowed);

// Row-normalized copy of a space's input vectors; dot product == cosine.
// Zero rows stay zero (cosine 0 against everything).
class NeighborIndex {
 public:
  explicit NeighborIndex(const EmbeddingSpace& space);
  explicit NeighborIndex(const Matrix& vectors);

  std::size_t size() const { return unit_.rows(); }

  // Top-n over all candidate rows other than each query, exact. Blocks of
  // queries are scored with one matrix product and spread over `jobs`
  // threads; output order follows `queries`.
  std::vector<NeighborList> query(std::span<const std::int32_t> queries, std::size_t n,
                                  const CandidateMask& candidates = {},
                                  std::size_t jobs = 1) const;
  NeighborList query(std::int32_t token, std::size_t n,
                     const CandidateMask& candidates = {}) const;

 private:
  Matrix unit_;
};

// Throws InputError if `token` is not in the space.
NeighborList nearest_neighbors(const EmbeddingSpace& space, const std::string& token,
                               std::size_t n, const CandidateMask& candidates = {});

struct StabilityRecord {
  std::int32_t token = 0;
  double stability = 0.0;
  std::size_t overlap = 0;    // |intersection of neighbor sets|
  std::size_t list_size = 0;  // min(n, candidates other than the token)
  std::vector<NeighborList> neighbors;  // per space, when retained
};

struct StabilityOptions {
  std::size_t n = 10;
  CandidateMask candidates;
  std::size_t jobs = 1;
  bool keep_neighbors = false;
};

// Throws InputError for fewer than two spaces and IncomparableError when the
// vocabulary fingerprints (or shapes) differ.
void check_comparable(std::span<const EmbeddingSpace> spaces);

// |N_1 & N_2 & ... & N_k| / list_size over neighbor sets.
double intersection_ratio(std::span<const NeighborList> lists, std::size_t* overlap = nullptr);

StabilityRecord stability(const std::string& token, std::span<const EmbeddingSpace> spaces,
                          const StabilityOptions& options = {});

struct StabilityReport {
  std::vector<StabilityRecord> records;  // ascending token index
  std::vector<std::string> warnings;
};

// `tokens` selects which rows get a record (empty selection -> warning and
// empty report); order of the result is always by token index.
StabilityReport stability_report(std::span<const EmbeddingSpace> spaces,
                                 std::vector<std::int32_t> tokens,
                                 const StabilityOptions& options = {});

// Token indices whose frequency satisfies `keep`; used for group filters
// such as "frequency < 100".
template <typename Pred>
std::vector<std::int32_t> select_tokens(const Vocabulary& vocab, Pred&& keep) {
  std::vector<std::int32_t> out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (keep(static_cast<std::int32_t>(i), vocab.frequency(i))) out.push_back(static_cast<std::int32_t>(i));
  }
  return out;
}

// `token,frequency,stability`
void write_stability_csv(std::ostream& out, const StabilityReport& report, const Vocabulary& vocab);
// `token,space,rank,neighbor,cosine` for records that kept their lists.
void write_neighbor_dump(std::ostream& out, const StabilityReport& report, const Vocabulary& vocab);

}  // namespace embstab

#endif  // EMBSTAB_STABILITY_H_
