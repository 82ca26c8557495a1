// test_sgns.cc
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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "embstab/errors.h"
#include "embstab/sgns.h"
#include "test_support.h"

using namespace embstab;

namespace {

double sigmoid_ref(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Loss recomputed independently of the library.
double loss_ref(const std::vector<double>& t, const std::vector<double>& c, const Matrix& neg) {
  auto dot = [](std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  };
  double l = -std::log(sigmoid_ref(dot(c, t)));
  for (std::size_t k = 0; k < neg.rows(); ++k) l -= std::log(sigmoid_ref(-dot(neg.row(k), t)));
  return l;
}

double rel_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

Vocabulary vocab_of(const std::string& text, std::uint64_t min_count = 1) {
  return build_vocab(testing::split_sentences(text), min_count).vocabulary;
}

const char* kText =
    "the cat sat on the mat\nthe dog sat on the log\na cat and a dog\n"
    "the mat and the log\nthe cat saw the dog\n";

}  // namespace

TEST_CASE("default hyperparameters") {
  const Hyperparams p;
  CHECK(p.dim == 200);
  CHECK(p.window == 7);
  CHECK(p.epochs == 50);
  CHECK(p.negatives == 5);
  CHECK(p.smoothing == 0.75);
  CHECK(p.subsample == 1e-3);
  CHECK(p.min_count == 5);
  CHECK(p.label() == "7:50:5:0.75:0.001");
  CHECK(p.validate().empty());
}

TEST_CASE("hyperparameter validation") {
  auto bad = [](auto mutate) {
    Hyperparams p;
    mutate(p);
    return p;
  };
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.dim = 0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.window = 0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.epochs = 0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.negatives = 0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.subsample = 0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.min_count = 0; }).validate(), InputError);
  CHECK_THROWS_AS(bad([](Hyperparams& p) { p.final_lr = 1.0; }).validate(), InputError);
  CHECK(bad([](Hyperparams& p) { p.smoothing = 1.5; }).validate().size() == 1);
  CHECK(bad([](Hyperparams& p) { p.smoothing = 0.0; }).validate().empty());
}

TEST_CASE("rng is reproducible and separates streams") {
  Rng a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  CHECK(x != d.next());
  Rng r(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("initial vectors") {
  const auto v = vocab_of(kText);
  const auto s = init_embeddings(v, 10, 3);
  CHECK(s.size() == v.size());
  CHECK(s.dim() == 10);
  for (double x : s.input.data()) CHECK((x >= -0.05 && x < 0.05));
  for (double x : s.output.data()) CHECK(x == 0.0);
  CHECK(init_embeddings(v, 10, 3).input == s.input);
  CHECK_FALSE(init_embeddings(v, 10, 4).input == s.input);
  CHECK(s.vocab_fingerprint == v.fingerprint());
}

TEST_CASE("negative table probabilities") {
  std::vector<Vocabulary::Entry> entries{{"a", 4}, {"b", 1}};
  const Vocabulary v(entries, 1, 5);
  CHECK(build_negative_table(v, 0.75).probability(0) == doctest::Approx(0.7388).epsilon(1e-4));
  CHECK(build_negative_table(v, 1.0).probability(0) == doctest::Approx(0.8));
  CHECK(build_negative_table(v, 0.0).probability(1) == doctest::Approx(0.5));
}

TEST_CASE("negative sampling frequencies pass a chi-squared test") {
  std::vector<Vocabulary::Entry> entries;
  const std::vector<std::uint64_t> freq{500, 200, 120, 60, 30, 20, 10, 5};
  for (std::size_t i = 0; i < freq.size(); ++i) entries.push_back({"t" + std::to_string(i), freq[i]});
  const Vocabulary v(entries, 1, 945);
  const auto table = build_negative_table(v, 0.75);
  Rng rng(11, 5);
  const int draws = 200000;
  std::vector<int> seen(freq.size());
  for (int i = 0; i < draws; ++i) ++seen[static_cast<std::size_t>(table.sample(rng))];
  double chi2 = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    const double expected = draws * table.probability(i);
    chi2 += (seen[i] - expected) * (seen[i] - expected) / expected;
  }
  // 7 degrees of freedom; 24.32 is the 0.999 quantile.
  CHECK(chi2 < 24.32);
}

TEST_CASE("subsampling keep probability") {
  CHECK(subsample_keep_probability(1e-4, 1e-3) == 1.0);
  CHECK(subsample_keep_probability(0.1, 1e-3) == doctest::Approx(std::sqrt(0.01)));
  CHECK(subsample_keep_probability(1e-3, 1e-3) == 1.0);
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(99, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + rng.below(12);
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> t(dim), c(dim);
    Matrix neg(n, dim);
    for (auto& x : t) x = rng.uniform() * 2 - 1;
    for (auto& x : c) x = rng.uniform() * 2 - 1;
    for (auto& x : neg.data()) x = rng.uniform() * 2 - 1;
    const auto g = pair_loss_and_gradients(t, c, neg);
    CHECK(g.loss == doctest::Approx(loss_ref(t, c, neg)).epsilon(1e-12));
    const double h = 1e-5;
    auto check = [&](double& x, double analytic) {
      const double keep = x;
      x = keep + h;
      const double up = loss_ref(t, c, neg);
      x = keep - h;
      const double down = loss_ref(t, c, neg);
      x = keep;
      worst = std::max(worst, rel_error(analytic, (up - down) / (2 * h)));
    };
    for (std::size_t k = 0; k < dim; ++k) check(t[k], g.target[k]);
    for (std::size_t k = 0; k < dim; ++k) check(c[k], g.context[k]);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < dim; ++k) check(neg(r, k), g.negatives(r, k));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("loss is stable for large scores") {
  std::vector<double> t{40.0}, c{-40.0};
  Matrix neg(1, 1, 40.0);
  const auto g = pair_loss_and_gradients(t, c, neg);
  CHECK(std::isfinite(g.loss));
  CHECK(g.loss == doctest::Approx(3200.0).epsilon(1e-9));
}

TEST_CASE("deterministic training is a pure function of the seed") {
  const auto sentences = testing::split_sentences(kText);
  const auto v = vocab_of(kText);
  auto p = testing::tiny_params();
  p.subsample = 0.5;
  const auto a = train(sentences, v, p, 5);
  const auto b = train(sentences, v, p, 5);
  const auto c = train(sentences, v, p, 6);
  CHECK(a.space.input == b.space.input);
  CHECK(a.space.output == b.space.output);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK_FALSE(a.space.input == c.space.input);
  CHECK(a.space.deterministic);
  CHECK(a.space.seed == 5);
  CHECK(a.space.hyperparams == p);
  CHECK(a.pairs > 0);
  CHECK(a.epoch_loss.size() == static_cast<std::size_t>(p.epochs));
}

TEST_CASE("training lowers the loss") {
  const auto v = vocab_of(kText);
  auto p = testing::tiny_params();
  p.epochs = 30;
  p.subsample = 1.0;
  const auto r = train(testing::split_sentences(kText), v, p, 1);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
}

TEST_CASE("fixed window gives the exact pair count") {
  const auto v = vocab_of("a b c d e\n");
  auto p = testing::tiny_params();
  p.fixed_window = true;
  p.window = 2;
  p.epochs = 2;
  p.subsample = 1.0;
  const auto r = train(testing::split_sentences("a b c d e\n"), v, p, 1);
  // positions 0..4 with window 2: 2 + 3 + 4 + 3 + 2 contexts per epoch
  CHECK(r.pairs == 28);
}

TEST_CASE("parallel training is flagged non-deterministic") {
  const auto v = vocab_of(kText);
  const auto r = train(testing::split_sentences(kText), v, testing::tiny_params(), 1, TrainOptions{2});
  CHECK_FALSE(r.space.deterministic);
  for (double x : r.space.input.data()) CHECK(std::isfinite(x));
}

TEST_CASE("training errors") {
  const auto v = vocab_of("a b\n");
  CHECK_THROWS_AS(train(testing::split_sentences("a\nb\n"), v, testing::tiny_params(), 1), InputError);
  auto p = testing::tiny_params();
  p.window = 0;
  CHECK_THROWS_AS(train(testing::split_sentences("a b\n"), v, p, 1), InputError);
}
