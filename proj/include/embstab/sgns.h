// sgns.h
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
// Skip-gram with negative sampling.
//
// For a (target t, context c) pair with negatives n_1..n_N the per-pair loss
// is
//
//   L = -log sigma(u_c . v_t) - sum_k log sigma(-u_{n_k} . v_t)
//
// where v are input (target) vectors and u output (context) vectors.
// Training in deterministic mode is a pure function of (corpus, vocabulary,
// hyperparameters, seed).

#ifndef EMBSTAB_SGNS_H_
#define EMBSTAB_SGNS_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "embstab/corpus.h"
#include "embstab/matrix.h"

namespace embstab {

struct Hyperparams {
  int dim = 200;
  int window = 7;          // W
  int epochs = 50;         // E
  int negatives = 5;       // N
  double smoothing = 0.75; // M, exponent of the negative distribution
  double subsample = 1e-3; // S
  std::uint64_t min_count = 5;
  double initial_lr = 0.025;
  double final_lr = 0.0001;
  bool fixed_window = false;

  // Throws InputError on invalid values; returns warnings for values that
  // are legal but outside the commonly tested range.
  std::vector<std::string> validate() const;

  // "W:E:N:M:S", e.g. "7:50:5:0.75:0.001".
  std::string label() const;

  bool operator==(const Hyperparams&) const = default;
};

// Seeded generator with portable uniform draws (the standard distributions
// are implementation-defined, the engine and seed_seq are not).
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  double uniform();                          // [0, 1)
  std::uint64_t below(std::uint64_t bound);  // [0, bound), unbiased

 private:
  std::mt19937_64 engine_;
};

struct EmbeddingSpace {
  std::vector<std::string> tokens;  // row order == vocabulary index
  Matrix input;                     // V x dim, used for neighbors
  Matrix output;                    // V x dim; empty when loaded from disk
  std::string vocab_fingerprint;
  std::uint64_t seed = 0;
  Hyperparams hyperparams;
  bool deterministic = true;

  std::size_t size() const { return input.rows(); }
  std::size_t dim() const { return input.cols(); }
};

// Input vectors uniform in [-0.5/dim, 0.5/dim), output vectors zero.
EmbeddingSpace init_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed);

// P(w) proportional to freq(w)^smoothing, sampled by inverse CDF.
class NegativeTable {
 public:
  NegativeTable(const Vocabulary& vocab, double smoothing);

  std::size_t size() const { return cumulative_.size(); }
  double probability(std::size_t index) const;
  std::int32_t sample(Rng& rng) const;

 private:
  std::vector<double> cumulative_;  // normalized, back() == 1
};

NegativeTable build_negative_table(const Vocabulary& vocab, double smoothing);

// min(1, sqrt(S / f)) for a token making up fraction f of the corpus.
double subsample_keep_probability(double frequency_ratio, double threshold);
bool subsample_keep(double frequency_ratio, double threshold, Rng& rng);

struct PairGradients {
  double loss = 0.0;
  std::vector<double> target;   // dL/dv_t
  std::vector<double> context;  // dL/du_c
  Matrix negatives;             // row k: dL/du_{n_k}
};

// Exact loss and partial derivatives; `out` buffers are resized as needed
// so a workspace can be reused across calls.
void pair_loss_and_gradients(std::span<const double> target,
                             std::span<const double> context,
                             const Matrix& negatives, PairGradients& out);
PairGradients pair_loss_and_gradients(std::span<const double> target,
                                      std::span<const double> context,
                                      const Matrix& negatives);

struct TrainOptions {
  // threads > 1 switches to lock-free shared updates; the result is then
  // flagged non-deterministic.
  std::size_t threads = 1;
};

struct TrainResult {
  EmbeddingSpace space;
  std::vector<double> epoch_loss;  // mean loss per pair, one per epoch
  std::uint64_t pairs = 0;         // total (target, context) updates
};

// Throws InputError when the stream yields no training pairs.
TrainResult train(const EncodedCorpus& corpus, const Vocabulary& vocab,
                  const Hyperparams& params, std::uint64_t seed,
                  const TrainOptions& options = {});
TrainResult train(const std::vector<std::vector<std::string>>& sentences,
                  const Vocabulary& vocab, const Hyperparams& params,
                  std::uint64_t seed, const TrainOptions& options = {});

}  // namespace embstab

#endif  // EMBSTAB_SGNS_H_
