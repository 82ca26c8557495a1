// sgns.cc
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

#include "embstab/sgns.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "embstab/errors.h"
#include "embstab/format.h"
#include "embstab/parallel.h"

namespace embstab {
namespace {

constexpr int kMaxRedraws = 8;
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kScheduleStreamBase = 1000;
constexpr std::uint64_t kNegativeStreamBase = 2000;

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Matrix element access for the two training modes. Shared mode goes through
// relaxed atomics so concurrent hogwild updates are races on values only.
struct PlainAccess {
  static double load(const double& x) { return x; }
  static void store(double& x, double v) { x = v; }
};

struct SharedAccess {
  static double load(const double& x) {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  }
  static void store(double& x, double v) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  }
};

// Subsamples `sentence` into `kept` and calls fn(kept, position, lo, hi) with
// the inclusive context range of every kept position.
template <typename Fn>
void walk_sentence(std::span<const std::int32_t> sentence, const std::vector<double>& keep,
                   const Hyperparams& params, Rng& schedule, std::vector<std::int32_t>& kept,
                   Fn&& fn) {
  kept.clear();
  for (std::int32_t id : sentence) {
    const double p = keep[static_cast<std::size_t>(id)];
    if (p >= 1.0 || schedule.uniform() < p) kept.push_back(id);
  }
  const auto n = static_cast<std::ptrdiff_t>(kept.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto b = params.fixed_window
                       ? static_cast<std::ptrdiff_t>(params.window)
                       : static_cast<std::ptrdiff_t>(
                             1 + schedule.below(static_cast<std::uint64_t>(params.window)));
    fn(kept, i, std::max<std::ptrdiff_t>(0, i - b), std::min(n - 1, i + b));
  }
}

struct Shard {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint64_t stream = 0;
};

std::uint64_t count_pairs(const EncodedCorpus& corpus, const Shard& shard,
                          const std::vector<double>& keep, const Hyperparams& params,
                          std::uint64_t seed) {
  Rng schedule(seed, kScheduleStreamBase + shard.stream);
  std::vector<std::int32_t> kept;
  std::uint64_t pairs = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t s = shard.begin; s < shard.end; ++s) {
      walk_sentence(corpus[s], keep, params, schedule, kept,
                    [&](const auto&, std::ptrdiff_t, std::ptrdiff_t lo, std::ptrdiff_t hi) {
                      pairs += static_cast<std::uint64_t>(hi - lo);
                    });
    }
  }
  return pairs;
}

template <typename Access>
class Worker {
 public:
  Worker(EmbeddingSpace& space, const NegativeTable& negatives, const Hyperparams& params,
         std::uint64_t seed, std::uint64_t stream, std::uint64_t total_pairs)
      : space_(space),
        table_(negatives),
        params_(params),
        negatives_rng_(seed, kNegativeStreamBase + stream),
        total_pairs_(total_pairs),
        dim_(space.dim()),
        target_(dim_),
        context_(dim_) {}

  void run(const EncodedCorpus& corpus, const Shard& shard, const std::vector<double>& keep,
           std::uint64_t seed, std::vector<std::pair<double, std::uint64_t>>& epoch_loss) {
    Rng schedule(seed, kScheduleStreamBase + shard.stream);
    std::vector<std::int32_t> kept;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
      double loss = 0.0;
      std::uint64_t pairs = 0;
      for (std::size_t s = shard.begin; s < shard.end; ++s) {
        walk_sentence(corpus[s], keep, params_, schedule, kept,
                      [&](const std::vector<std::int32_t>& ids, std::ptrdiff_t i,
                          std::ptrdiff_t lo, std::ptrdiff_t hi) {
                        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                          if (j == i) continue;
                          loss += step(ids[static_cast<std::size_t>(i)],
                                       ids[static_cast<std::size_t>(j)]);
                          ++pairs;
                        }
                      });
      }
      epoch_loss[static_cast<std::size_t>(epoch)].first += loss;
      epoch_loss[static_cast<std::size_t>(epoch)].second += pairs;
    }
  }

 private:
  double learning_rate() const {
    const double progress =
        static_cast<double>(processed_) / static_cast<double>(std::max<std::uint64_t>(1, total_pairs_));
    return params_.initial_lr - (params_.initial_lr - params_.final_lr) * std::min(1.0, progress);
  }

  void gather(const Matrix& m, std::size_t r, std::span<double> out) const {
    const auto row = m.row(r);
    for (std::size_t k = 0; k < dim_; ++k) out[k] = Access::load(row[k]);
  }

  void apply(Matrix& m, std::size_t r, std::span<const double> grad, double lr) {
    auto row = m.row(r);
    for (std::size_t k = 0; k < dim_; ++k) Access::store(row[k], Access::load(row[k]) - lr * grad[k]);
  }

  double step(std::int32_t target, std::int32_t context) {
    sampled_.clear();
    for (int k = 0; k < params_.negatives; ++k) {
      std::int32_t n = table_.sample(negatives_rng_);
      for (int retry = 0; n == context && retry < kMaxRedraws; ++retry) n = table_.sample(negatives_rng_);
      if (n != context) sampled_.push_back(n);
    }

    gather(space_.input, static_cast<std::size_t>(target), target_);
    gather(space_.output, static_cast<std::size_t>(context), context_);
    negative_rows_.resize(sampled_.size(), dim_);
    for (std::size_t k = 0; k < sampled_.size(); ++k) {
      gather(space_.output, static_cast<std::size_t>(sampled_[k]), negative_rows_.row(k));
    }

    pair_loss_and_gradients(target_, context_, negative_rows_, grads_);

    const double lr = learning_rate();
    apply(space_.output, static_cast<std::size_t>(context), grads_.context, lr);
    for (std::size_t k = 0; k < sampled_.size(); ++k) {
      apply(space_.output, static_cast<std::size_t>(sampled_[k]), grads_.negatives.row(k), lr);
    }
    apply(space_.input, static_cast<std::size_t>(target), grads_.target, lr);
    ++processed_;
    return grads_.loss;
  }

  EmbeddingSpace& space_;
  const NegativeTable& table_;
  const Hyperparams& params_;
  Rng negatives_rng_;
  std::uint64_t total_pairs_;
  std::uint64_t processed_ = 0;
  std::size_t dim_;
  std::vector<double> target_;
  std::vector<double> context_;
  std::vector<std::int32_t> sampled_;
  Matrix negative_rows_;
  PairGradients grads_;
};

}  // namespace

std::vector<std::string> Hyperparams::validate() const {
  if (dim < 1) throw InputError("dim must be >= 1");
  if (window < 1) throw InputError("window (W) must be >= 1");
  if (epochs < 1) throw InputError("epochs (E) must be >= 1");
  if (negatives < 1) throw InputError("negatives (N) must be >= 1");
  if (!std::isfinite(smoothing)) throw InputError("smoothing (M) must be finite");
  if (!(subsample > 0.0) || !std::isfinite(subsample)) throw InputError("subsample (S) must be > 0");
  if (min_count < 1) throw InputError("min_count must be >= 1");
  if (!(final_lr > 0.0) || !(initial_lr > final_lr)) {
    throw InputError("learning rates must satisfy initial_lr > final_lr > 0");
  }
  std::vector<std::string> warnings;
  if (smoothing < 0.0 || smoothing > 1.0) {
    warnings.push_back("smoothing (M) = " + format_number(smoothing) + " is outside [0, 1]");
  }
  return warnings;
}

std::string Hyperparams::label() const {
  return std::to_string(window) + ":" + std::to_string(epochs) + ":" + std::to_string(negatives) +
         ":" + format_number(smoothing) + ":" + format_number(subsample);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

EmbeddingSpace init_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("dim must be >= 1");
  EmbeddingSpace space;
  space.tokens.reserve(vocab.size());
  for (const auto& e : vocab.entries()) space.tokens.push_back(e.token);
  const auto d = static_cast<std::size_t>(dim);
  space.input.resize(vocab.size(), d);
  space.output.resize(vocab.size(), d);
  space.vocab_fingerprint = vocab.fingerprint();
  space.seed = seed;
  space.hyperparams.dim = dim;
  Rng rng(seed, kInitStream);
  for (double& x : space.input.data()) x = (rng.uniform() - 0.5) / dim;
  return space;
}

NegativeTable::NegativeTable(const Vocabulary& vocab, double smoothing) {
  if (vocab.empty()) throw InputError("negative table needs a non-empty vocabulary");
  cumulative_.reserve(vocab.size());
  double total = 0.0;
  for (const auto& e : vocab.entries()) {
    total += std::pow(static_cast<double>(e.frequency), smoothing);
    cumulative_.push_back(total);
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

double NegativeTable::probability(std::size_t index) const {
  return index == 0 ? cumulative_[0] : cumulative_[index] - cumulative_[index - 1];
}

std::int32_t NegativeTable::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                            static_cast<std::ptrdiff_t>(cumulative_.size()) - 1);
  return static_cast<std::int32_t>(idx);
}

NegativeTable build_negative_table(const Vocabulary& vocab, double smoothing) {
  return NegativeTable(vocab, smoothing);
}

double subsample_keep_probability(double frequency_ratio, double threshold) {
  if (frequency_ratio <= threshold) return 1.0;
  return std::min(1.0, std::sqrt(threshold / frequency_ratio));
}

bool subsample_keep(double frequency_ratio, double threshold, Rng& rng) {
  const double p = subsample_keep_probability(frequency_ratio, threshold);
  return p >= 1.0 || rng.uniform() < p;
}

void pair_loss_and_gradients(std::span<const double> target, std::span<const double> context,
                             const Matrix& negatives, PairGradients& out) {
  const std::size_t dim = target.size();
  out.target.assign(dim, 0.0);
  out.context.resize(dim);
  out.negatives.resize(negatives.rows(), dim);

  const double pos = dot(context, target);
  // d/dx of softplus(-x) is -(1 - sigma(x)).
  const double g_pos = sigmoid(pos) - 1.0;
  out.loss = softplus(-pos);
  for (std::size_t k = 0; k < dim; ++k) {
    out.context[k] = g_pos * target[k];
    out.target[k] += g_pos * context[k];
  }
  for (std::size_t n = 0; n < negatives.rows(); ++n) {
    const auto u = negatives.row(n);
    const double x = dot(u, target);
    const double g = sigmoid(x);
    out.loss += softplus(x);
    auto gn = out.negatives.row(n);
    for (std::size_t k = 0; k < dim; ++k) {
      gn[k] = g * target[k];
      out.target[k] += g * u[k];
    }
  }
}

PairGradients pair_loss_and_gradients(std::span<const double> target,
                                      std::span<const double> context, const Matrix& negatives) {
  PairGradients out;
  pair_loss_and_gradients(target, context, negatives, out);
  return out;
}

TrainResult train(const EncodedCorpus& corpus, const Vocabulary& vocab, const Hyperparams& params,
                  std::uint64_t seed, const TrainOptions& options) {
  params.validate();
  if (vocab.empty()) throw InputError("empty vocabulary");

  TrainResult result;
  result.space = init_embeddings(vocab, params.dim, seed);
  result.space.hyperparams = params;

  const double retained = static_cast<double>(vocab.retained_tokens());
  std::vector<double> keep(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    keep[i] = subsample_keep_probability(static_cast<double>(vocab.frequency(i)) / retained,
                                         params.subsample);
  }
  const NegativeTable table(vocab, params.smoothing);

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, corpus.size()));
  std::vector<Shard> shards(threads);
  const std::size_t step = corpus.empty() ? 0 : (corpus.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    shards[t] = {std::min(corpus.size(), t * step), std::min(corpus.size(), (t + 1) * step), t};
  }

  std::vector<std::uint64_t> shard_pairs(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    shard_pairs[t] = count_pairs(corpus, shards[t], keep, params, seed);
    result.pairs += shard_pairs[t];
  }
  if (result.pairs == 0) throw InputError("empty training stream after subsampling");

  const auto epochs = static_cast<std::size_t>(params.epochs);
  std::vector<std::vector<std::pair<double, std::uint64_t>>> losses(
      threads, std::vector<std::pair<double, std::uint64_t>>(epochs));

  if (threads == 1) {
    Worker<PlainAccess> worker(result.space, table, params, seed, 0, shard_pairs[0]);
    worker.run(corpus, shards[0], keep, seed, losses[0]);
  } else {
    result.space.deterministic = false;
    parallel_for(threads, threads, [&](std::size_t t) {
      Worker<SharedAccess> worker(result.space, table, params, seed, t, shard_pairs[t]);
      worker.run(corpus, shards[t], keep, seed, losses[t]);
    });
  }

  result.epoch_loss.assign(epochs, 0.0);
  for (std::size_t e = 0; e < epochs; ++e) {
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const auto& per_thread : losses) {
      sum += per_thread[e].first;
      n += per_thread[e].second;
    }
    result.epoch_loss[e] = n ? sum / static_cast<double>(n) : 0.0;
  }

  for (const Matrix* m : {&result.space.input, &result.space.output}) {
    if (!std::all_of(m->data().begin(), m->data().end(), [](double x) { return std::isfinite(x); })) {
      throw std::runtime_error("training produced non-finite vectors");
    }
  }
  return result;
}

TrainResult train(const std::vector<std::vector<std::string>>& sentences, const Vocabulary& vocab,
                  const Hyperparams& params, std::uint64_t seed, const TrainOptions& options) {
  return train(encode(sentences, vocab), vocab, params, seed, options);
}

}  // namespace embstab
