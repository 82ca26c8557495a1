// test_sweep.cc
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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "embstab/errors.h"
#include "embstab/format.h"
#include "embstab/sweep.h"
#include "json.hpp"
#include "test_support.h"

using namespace embstab;
using nlohmann::json;

namespace {

json standard_axes() {
  return json{{"W", {5, 10}}, {"E", {30, 100}}, {"N", {10, 15}}, {"M", {0.0, 1.0}}, {"S", {0.01, 0.0001}}};
}

json small_config() {
  return json{{"corpus", "toy_corpus.txt"},
              {"modes", {"cui2vec", "nlm"}},
              {"base", {{"dim", 8}, {"epochs", 2}, {"window", 2}, {"min_count", 2}}},
              {"axes", {{"W", {1, 3}}, {"M", {0.5}}}},
              {"seeds", {1, 2}}};
}

std::vector<std::vector<std::string>> csv_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return read_csv(in);
}

std::vector<TaggedSentence> toy_corpus() {
  std::ifstream in(testing::data_path("toy_corpus.txt"));
  return parse_tagged_text(in);
}

}  // namespace

TEST_CASE("axis names") {
  CHECK(axis_title(Axis::kWindow) == "Window size (W)");
  CHECK(axis_title(Axis::kEpochs) == "Epoch (E)");
  CHECK(axis_title(Axis::kNegatives) == "Number of NS (N)");
  CHECK(axis_title(Axis::kSmoothing) == "Smoothing (M)");
  CHECK(axis_title(Axis::kSubsample) == "Subsampling rate (S)");
  for (char c : std::string("WENMS")) CHECK(axis_letter(parse_axis(std::string(1, c))) == c);
  CHECK_THROWS_AS(parse_axis("Q"), InputError);
}

TEST_CASE("standard axis set gives one default and ten variant rows") {
  const auto config = parse_sweep_config(json{{"corpus", "c.txt"}, {"axes", standard_axes()}});
  const auto rows = sweep_rows(config);
  REQUIRE(rows.size() == 11);
  CHECK(rows[0].parameter == "Default");
  CHECK(rows[0].value.empty());
  CHECK(rows[0].params.label() == "7:50:5:0.75:0.001");
  const std::vector<std::string> labels{"5:50:5:0.75:0.001", "10:50:5:0.75:0.001", "7:30:5:0.75:0.001",
                                        "7:100:5:0.75:0.001", "7:50:10:0.75:0.001", "7:50:15:0.75:0.001",
                                        "7:50:5:0:0.001",     "7:50:5:1:0.001",     "7:50:5:0.75:0.01",
                                        "7:50:5:0.75:0.0001"};
  for (std::size_t i = 0; i < labels.size(); ++i) CHECK(rows[i + 1].params.label() == labels[i]);
  CHECK(rows[1].parameter == "Window size (W)");
  CHECK(rows[1].value == "5");
  CHECK(rows[10].parameter == "Subsampling rate (S)");
  CHECK(rows[10].value == "0.0001");
}

TEST_CASE("axes are ordered W, E, N, M, S regardless of input order") {
  const auto config = parse_sweep_config(json{{"corpus", "c"}, {"axes", {{"S", {0.01}}, {"W", {3}}}}});
  REQUIRE(config.axes.size() == 2);
  CHECK(config.axes[0].axis == Axis::kWindow);
  CHECK(config.axes[1].axis == Axis::kSubsample);
}

TEST_CASE("config errors") {
  auto fails = [](json j) { CHECK_THROWS_AS(parse_sweep_config(j), InputError); };
  fails(json{{"axes", standard_axes()}});
  fails(json{{"corpus", "c"}, {"axes", {{"W", json::array()}}}});
  fails(json{{"corpus", "c"}, {"axes", {{"W", {2.5}}}}});
  fails(json{{"corpus", "c"}, {"axes", {{"E", {0}}}}});
  fails(json{{"corpus", "c"}, {"seeds", {1}}});
  fails(json{{"corpus", "c"}, {"modes", json::array()}});
  fails(json{{"corpus", "c"}, {"color", "blue"}});
  fails(json{{"corpus", "c"}, {"axes", {{"Z", {1}}}}});
  fails(json::array());
}

TEST_CASE("relative paths resolve against the config directory") {
  const auto config = parse_sweep_config(json{{"corpus", "c.txt"}, {"output", "out"}}, "/base");
  CHECK(config.corpus == std::filesystem::path("/base/c.txt"));
  CHECK(config.output == std::filesystem::path("/base/out"));
}

TEST_CASE("bundled sweep config is accepted") {
  const auto config = load_sweep_config(testing::data_path("sweep_axes.json"));
  CHECK(sweep_rows(config).size() == 11);
  CHECK(std::filesystem::exists(config.corpus));
}

TEST_CASE("sweep runs, shares identical rows and resumes") {
  testing::TempDir dir;
  auto config = parse_sweep_config(small_config(), std::filesystem::path(EMBSTAB_DATA_DIR));
  config.output = dir / "sweep";
  const auto corpus = toy_corpus();

  const auto first = run_sweep(corpus, config);
  REQUIRE(first.rows.size() == 4);
  // 4 distinct parameter sets x 2 modes x 2 seeds
  CHECK(first.trained == 16);
  CHECK(first.reused == 0);
  for (const auto& row : first.rows) {
    REQUIRE(row.cells.size() == 2);
    for (const auto& c : row.cells) {
      CHECK(c.tokens > 0);
      CHECK((c.mean >= 0.0 && c.mean <= 1.0));
      CHECK(c.stdev >= 0.0);
    }
  }
  CHECK(std::filesystem::exists(config.output / "manifest.json"));

  const auto second = run_sweep(corpus, config);
  CHECK(second.trained == 0);
  CHECK(second.reused == 16);
  for (std::size_t r = 0; r < first.rows.size(); ++r)
    for (std::size_t m = 0; m < 2; ++m) CHECK(second.rows[r].cells[m].mean == first.rows[r].cells[m].mean);

  write_sweep_report(dir / "report", second);
  const auto t3 = csv_file(dir / "report" / "table3.csv");
  const auto t4 = csv_file(dir / "report" / "table4.csv");
  REQUIRE(t3.size() == 5);
  CHECK(t3[0] == std::vector<std::string>{"parameter", "value", "W:E:N:M:S", "cui2vec_mean", "cui2vec_stdev",
                                          "nlm_mean", "nlm_stdev"});
  CHECK(t4[0] == std::vector<std::string>{"parameter", "value", "W:E:N:M:S", "cui2vec_rho", "nlm_rho"});
  CHECK(t3[1][0] == "Default");
  CHECK(t3[2][0] == "Window size (W)");
  CHECK(t3[2][2] == "1:2:5:0.75:0.001");
}

TEST_CASE("sweep without an output directory trains in memory") {
  auto config = parse_sweep_config(small_config(), std::filesystem::path(EMBSTAB_DATA_DIR));
  config.axes.clear();
  config.jobs = 2;
  const auto report = run_sweep(toy_corpus(), config);
  CHECK(report.rows.size() == 1);
  CHECK(report.trained == 4);
}
