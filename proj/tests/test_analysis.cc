// test_analysis.cc
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
#include <sstream>

#include "doctest.h"
#include "embstab/analysis.h"
#include "embstab/errors.h"
#include "embstab/format.h"
#include "test_support.h"

#ifdef EMBSTAB_HAVE_BOOST_MATH
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#endif

using namespace embstab;

namespace {

// Textbook single-expression formula, sums accumulated naively.
double closed_form_rho(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> random_series(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform() * 10 - 5;
  return v;
}

JoinedRecord record(std::uint64_t freq, double stab, std::optional<double> ent = 0.5) {
  JoinedRecord r;
  r.frequency = freq;
  r.stability = stab;
  r.entropy = ent;
  return r;
}

}  // namespace

TEST_CASE("pearson worked example") {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 5};
  const auto r = pearson(x, y);
  CHECK(r.rho == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.n == 5);
  // t = 0.8 sqrt(3 / 0.36), df 3
  CHECK(r.p_value == doctest::Approx(0.1040880).epsilon(1e-5));
}

TEST_CASE("pearson errors") {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, c{4, 4, 4};
  CHECK_THROWS_AS(pearson(a, b), InputError);
  CHECK_THROWS_AS(pearson(b, b), InputError);
  CHECK_THROWS_AS(pearson(a, c), DegenerateSeriesError);
  CHECK_THROWS_AS(pearson(c, a), DegenerateSeriesError);
}

TEST_CASE("perfect correlation") {
  const std::vector<double> a{1, 2, 3, 4}, b{3, 5, 7, 9}, c{-1, -2, -3, -4};
  CHECK(pearson(a, b).rho == doctest::Approx(1.0));
  CHECK(pearson(a, b).p_value == doctest::Approx(0.0));
  CHECK(pearson(a, c).rho == doctest::Approx(-1.0));
}

TEST_CASE("pearson matches the closed form and its invariances") {
  Rng rng(21, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.below(60);
    const auto x = random_series(rng, n), y = random_series(rng, n);
    const auto r = pearson(x, y);
    CHECK(std::abs(r.rho - closed_form_rho(x, y)) < 1e-12);
    CHECK(std::abs(pearson(y, x).rho - r.rho) < 1e-12);
    auto ax = x, nx = x;
    for (auto& v : ax) v = 3.5 * v + 2.0;
    for (auto& v : nx) v = -0.25 * v + 1.0;
    CHECK(std::abs(pearson(ax, y).rho - r.rho) < 1e-12);
    CHECK(std::abs(pearson(nx, y).rho + r.rho) < 1e-12);
    CHECK((r.p_value >= 0.0 && r.p_value <= 1.0));
  }
}

TEST_CASE("p-value decreases with |rho| at fixed n") {
  double previous = 2.0;
  for (double rho = 0.0; rho < 0.99; rho += 0.05) {
    const double df = 20;
    const double t = rho * std::sqrt(df / (1 - rho * rho));
    const double p = student_t_two_sided_p(t, df);
    CHECK(p < previous);
    previous = p;
  }
  CHECK(student_t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
  CHECK(student_t_two_sided_p(2.0, 5) == student_t_two_sided_p(-2.0, 5));
}

TEST_CASE("incomplete beta edge values") {
  CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
  // I_x(1, 1) = x; I_x(a, 1) = x^a
  CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(2.5, 1, 0.4) == doctest::Approx(std::pow(0.4, 2.5)).epsilon(1e-12));
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 1, 0.5), InputError);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 1, 1.5), InputError);
}

#ifdef EMBSTAB_HAVE_BOOST_MATH
TEST_CASE("incomplete beta and t p-values agree with boost") {
  Rng rng(5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = 0.1 + rng.uniform() * 50, b = 0.1 + rng.uniform() * 50, x = rng.uniform();
    CHECK(regularized_incomplete_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
  }
  for (double df : {1.0, 2.0, 3.0, 8.0, 30.0, 250.0, 5000.0}) {
    const boost::math::students_t dist(df);
    for (double t : {0.1, 0.7, 1.5, 2.3, 4.0, 9.0}) {
      const double expected = 2 * boost::math::cdf(boost::math::complement(dist, t));
      CHECK(student_t_two_sided_p(t, df) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}
#endif

TEST_CASE("group filters") {
  std::vector<JoinedRecord> rs(8);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rs[i].low_freq = i % 2 == 0;
    rs[i].common = i % 3 == 0;
  }
  const auto low = filter_records(rs, low_freq_records());
  CHECK(low.size() == 4);
  CHECK(filter_records(low, low_freq_records()).size() == low.size());
  const auto lc = filter_records(rs, both(low_freq_records(), common_records()));
  CHECK(lc.size() == 2);  // indices 0 and 6
  CHECK(filter_records(filter_records(rs, common_records()), low_freq_records()).size() == lc.size());
  CHECK(filter_records(rs, all_records()).size() == rs.size());
}

TEST_CASE("correlations over joined records") {
  std::vector<JoinedRecord> rs;
  for (int i = 0; i < 6; ++i) rs.push_back(record(10 + i, 0.1 * i, 1.0 - 0.1 * i));
  rs.push_back(record(99, 0.3, std::nullopt));
  const auto e = correlate_entropy_stability(rs);
  CHECK(e.n == 6);
  CHECK(e.rho == doctest::Approx(-1.0));
  const auto f = correlate_frequency_stability(rs);
  CHECK(f.n == 7);
}

TEST_CASE("join attaches entropy and group flags") {
  const std::vector<Vocabulary::Entry> entries{{"a", 500}, {"b", 50}, {"c", 7}};
  const Vocabulary vocab(entries, 5, 557);
  StabilityReport stab;
  stab.records = {{0, 0.5, 5, 10, {}}, {2, 0.2, 2, 10, {}}};
  const std::vector<EntropyRecord> ent{{0, 500, 4, 0.3}, {1, 50, 2, 0.4}, {2, 7, 0, std::nullopt}};
  const auto joined = join_records(stab, ent, vocab, {"c"}, 100);
  REQUIRE(joined.size() == 2);
  CHECK(joined[0].name == "a");
  CHECK(joined[0].entropy == 0.3);
  CHECK_FALSE(joined[0].low_freq);
  CHECK_FALSE(joined[0].common);
  CHECK(joined[1].name == "c");
  CHECK_FALSE(joined[1].entropy.has_value());
  CHECK(joined[1].low_freq);
  CHECK(joined[1].common);
}

TEST_CASE("heatmap hand binning") {
  const std::vector<JoinedRecord> rs{record(5, 0.0),  record(9, 0.05), record(10, 0.1), record(99, 0.95),
                                     record(100, 1.0), record(20000, 0.5), record(2, 0.3)};
  const auto g = bin_heatmap(rs, default_frequency_edges(5), default_stability_edges());
  REQUIRE(g.counts.size() == 5);
  REQUIRE(g.counts[0].size() == 10);
  CHECK(g.counts[0][0] == 2);  // 5 and 9 at [0, 0.1)
  CHECK(g.counts[0][3] == 1);  // frequency 2 clamps into the first bin
  CHECK(g.counts[1][1] == 1);
  CHECK(g.counts[1][9] == 1);
  CHECK(g.counts[2][9] == 1);  // 1.0 lands in the closed last bin
  CHECK(g.counts[4][5] == 1);
  CHECK(g.total() == rs.size());
}

TEST_CASE("default edges") {
  CHECK(default_frequency_edges(5) == std::vector<double>{5, 10, 100, 1000, 10000, INFINITY});
  CHECK(default_frequency_edges(20) == std::vector<double>{20, 100, 1000, 10000, INFINITY});
  const auto s = default_stability_edges();
  REQUIRE(s.size() == 11);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == 1.0);
}

TEST_CASE("heatmap edge validation") {
  const std::vector<JoinedRecord> rs{record(5, 0.5)};
  CHECK_THROWS_AS(bin_heatmap(rs, {5}, default_stability_edges()), InputError);
  CHECK_THROWS_AS(bin_heatmap(rs, {5, 5, 10}, default_stability_edges()), InputError);
  CHECK_THROWS_AS(bin_heatmap(rs, {5, 10}, {0.0, 0.5}), InputError);
}

TEST_CASE("heatmap conserves records") {
  Rng rng(2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<JoinedRecord> rs(rng.below(200));
    for (auto& r : rs) r = record(rng.below(50000), rng.uniform() * 1.0000001);
    const auto g = bin_heatmap(rs, default_frequency_edges(1 + rng.below(9)), default_stability_edges());
    CHECK(g.total() == rs.size());
  }
}

TEST_CASE("correlation table layout and degenerate groups") {
  std::vector<JoinedRecord> rs;
  for (int i = 0; i < 10; ++i) {
    auto r = record(static_cast<std::uint64_t>(5 + 20 * i), 1.0, 0.1 * i);
    r.low_freq = r.frequency < 100;
    r.common = i % 2 == 0;
    rs.push_back(r);
  }
  const auto rows = correlation_table(rs, true);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].measure == "entropy");
  CHECK(rows[0].group == "all");
  CHECK(rows[1].group == "low_freq");
  CHECK(rows[2].group == "low_freq_common");
  CHECK(rows[3].measure == "frequency");
  for (const auto& r : rows) {
    CHECK_FALSE(r.result.has_value());
    CHECK(r.status == "degenerate series");
  }
  const auto without = correlation_table(rs, false);
  CHECK(without[2].status == "no common-concept list");

  std::ostringstream out;
  write_correlation_csv(out, rows);
  std::istringstream in(out.str());
  const auto csv = read_csv(in);
  REQUIRE(csv.size() == 7);
  CHECK(csv[0] == std::vector<std::string>{"measure", "group", "n", "rho", "p_value", "status"});
}

TEST_CASE("joined CSV round trip") {
  std::vector<JoinedRecord> rs{record(12, 0.3, 0.25), record(400, 0.9, std::nullopt)};
  rs[0].name = "x,1";
  rs[0].token = 0;
  rs[0].low_freq = true;
  rs[1].name = "y";
  rs[1].token = 1;
  rs[1].common = true;
  rs[1].distinct_contexts = 0;
  rs[0].distinct_contexts = 3;
  std::ostringstream out;
  write_joined_csv(out, rs);
  std::istringstream in(out.str());
  const auto back = read_joined_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "x,1");
  CHECK(back[0].entropy == 0.25);
  CHECK(back[0].low_freq);
  CHECK(back[0].distinct_contexts == 3);
  CHECK_FALSE(back[1].entropy.has_value());
  CHECK(back[1].common);
  CHECK(back[1].stability == 0.9);
}

TEST_CASE("heatmap CSV layouts") {
  const std::vector<JoinedRecord> rs{record(7, 0.95), record(50, 0.05)};
  const auto g = bin_heatmap(rs, default_frequency_edges(5), default_stability_edges());
  std::ostringstream grid, lng;
  write_heatmap_grid_csv(grid, g);
  write_heatmap_long_csv(lng, g);
  std::istringstream gin(grid.str()), lin(lng.str());
  const auto gr = read_csv(gin), lr = read_csv(lin);
  REQUIRE(gr.size() == 6);
  CHECK(gr[0].size() == 11);
  CHECK(gr[0][0] == "freq_bin");
  CHECK(gr[0][10] == "0.9-1");
  CHECK(gr[1][0] == "5-10");
  CHECK(gr[1][10] == "1");
  CHECK(lr[0] == std::vector<std::string>{"freq_bin", "stab_bin", "count"});
  CHECK(lr.size() == 1 + 5 * 10);
}
