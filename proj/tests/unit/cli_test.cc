// Copyright 2026 The rpdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "commands.h"
#include "config.h"
#include "rpdp/csv_util.h"
#include "rpdp/errors.h"

namespace rpdp::cli {
namespace {

namespace fs = std::filesystem;

fs::path ScratchDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rpdp_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(SplitCsvLine(line));
  return rows;
}

int ExitCodeOf(const std::string& json) {
  try {
    ParseConfig(json);
  } catch (const std::exception& e) {
    return ExitCodeFor(e);
  }
  return 0;
}

TEST(ConfigTest, DefaultsAndParsing) {
  const ExperimentConfig c = ParseConfig("{}");
  EXPECT_EQ(c.mechanism.sigma, 1.0);
  EXPECT_EQ(c.run.modes.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<BoundedMixGauss>(*c.budgets));

  const ExperimentConfig d = ParseConfig(R"({
    "mechanism": {"sigma": 1.5, "delta": 1e-5, "alpha_max": 32,
                  "threat": "client"},
    "budgets": {"kind": "three_levels", "levels": [0.5, 1, 2],
                "weights": [0.5, 0.3, 0.2]},
    "dataset": {"kind": "synthetic", "clients": 3, "partition": "non_iid"},
    "run": {"modes": ["rpdp", "dropout"], "seeds": [4, 5],
            "learning_rate": 0.2},
    "output_dir": "x"})");
  EXPECT_EQ(d.mechanism.sigma, 1.5);
  EXPECT_EQ(d.mechanism.alpha_grid.back(), 32);
  EXPECT_EQ(d.mechanism.threat, ThreatModel::kClientOrThirdParty);
  EXPECT_EQ(std::get<ThreeLevels>(*d.budgets).levels[0], 0.5);
  EXPECT_EQ(d.dataset.synthetic.clients, 3);
  EXPECT_EQ(*d.dataset.partition, PartitionMode::kNonIid);
  EXPECT_EQ(d.run.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(d.output_dir, "x");

  const ExperimentConfig labels = ParseConfig(
      R"({"budgets": {"kind": "per_label", "mapping": {"0": 0.5, "1": 0.05}}})");
  EXPECT_EQ(std::get<PerLabel>(*labels.budgets).mapping.at(1), 0.05);
}

TEST(ConfigTest, RejectsUnknownAndMalformed) {
  EXPECT_EQ(ExitCodeOf(R"({"mechanism": {"sigmaa": 1}})"), 2);
  EXPECT_EQ(ExitCodeOf(R"({"extra": 1})"), 2);
  EXPECT_EQ(ExitCodeOf(R"({"run": {"modes": ["filter"]}})"), 2);
  EXPECT_EQ(ExitCodeOf(R"({"mechanism": {"delta": 2}})"), 2);
  EXPECT_EQ(ExitCodeOf(R"({"mechanism": {"tau": 1.5}})"), 2);
  EXPECT_EQ(ExitCodeOf(R"({"mechanism": {"sigma": "one"}})"), 2);
  EXPECT_EQ(ExitCodeOf(R"({"budgets": {"kind": "three_levels",
                                        "weights": [0.5, 0.5, 0.5]}})"),
            2);
  EXPECT_EQ(ExitCodeOf("{not json"), 2);
  EXPECT_EQ(ExitCodeFor(FitError("x")), 3);
  EXPECT_EQ(ExitCodeFor(DataError("x")), 4);
  EXPECT_EQ(ExitCodeFor(InvariantError("x")), 5);
  EXPECT_EQ(ExitCodeFor(std::runtime_error("x")), 5);
}

TEST(ConfigTest, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(RPDP_CONFIG_DIR)) {
    EXPECT_NO_THROW(LoadConfig(entry.path().string())) << entry.path();
  }
}

TEST(OverridesTest, FlagsReplaceConfig) {
  ExperimentConfig c = ParseConfig(R"({"run": {"seeds": [1, 2, 3]}})");
  Overrides o;
  o.seed = 9;
  o.threat = ThreatModel::kClientOrThirdParty;
  o.out_dir = "elsewhere";
  o.threads = 3;
  ApplyOverrides(o, c);
  EXPECT_EQ(c.run.seeds, std::vector<std::uint64_t>{9});
  EXPECT_EQ(c.mechanism.threat, ThreatModel::kClientOrThirdParty);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_EQ(c.run.threads, 3);
}

TEST(CmdCurvesTest, Fig4CurvesAreIncreasing) {
  const ExperimentConfig c =
      LoadConfig(std::string(RPDP_CONFIG_DIR) + "/fig4_curves.json");
  const fs::path out = ScratchDir("curves");
  CmdCurves(c, out);
  const auto opt = ReadCsv(out / "opt_eps_vs_q.csv");
  ASSERT_EQ(opt.size(), 101u);
  EXPECT_EQ(opt[0],
            (std::vector<std::string>{"sigma", "q", "eps_star", "alpha_star"}));
  for (std::size_t i = 2; i < opt.size(); ++i) {
    EXPECT_GT(std::stod(opt[i][2]), std::stod(opt[i - 1][2]));
  }
  const auto rdp = ReadCsv(out / "rdp_curve.csv");
  EXPECT_EQ(rdp.size(), 1u + 100u * 63u);
  EXPECT_EQ(rdp[0], (std::vector<std::string>{"sigma", "q", "alpha", "rho"}));
  const auto dp = ReadCsv(out / "dp_curve.csv");
  EXPECT_EQ(dp[0], (std::vector<std::string>{"sigma", "q", "alpha", "eps"}));
  fs::remove_all(out);
}

TEST(CmdCurvesTest, SingleUnsubsampledRow) {
  ExperimentConfig c = ParseConfig(R"({"curves": {"q_values": [1.0]}})");
  const fs::path out = ScratchDir("curves_one");
  CmdCurves(c, out);
  const auto opt = ReadCsv(out / "opt_eps_vs_q.csv");
  ASSERT_EQ(opt.size(), 2u);
  EXPECT_EQ(opt[1][2], FormatDouble(FlEpsilon(1.0, c.mechanism).epsilon));
  fs::remove_all(out);
}

TEST(CmdFitTest, WritesArtifactsAndReportsRSquared) {
  const ExperimentConfig c =
      LoadConfig(std::string(RPDP_CONFIG_DIR) + "/fig4_fit.json");
  const fs::path out = ScratchDir("fit");
  std::ostringstream log;
  const ExpFit fit = CmdFit(c, out, log);
  EXPECT_GE(fit.r_squared, 0.99);
  EXPECT_NE(log.str().find("R^2"), std::string::npos);
  EXPECT_NE(ReadFile(out / "scf_fit.json").find("\"r_squared\":"),
            std::string::npos);
  EXPECT_EQ(ReadCsv(out / "scf_observations.csv").size(), 101u);
  fs::remove_all(out);
}

TEST(CmdFitTest, TwoPointGridIsAFitFailure) {
  const ExperimentConfig c = ParseConfig(R"({"fit": {"q_grid": [0.5, 1.0]}})");
  std::ostringstream log;
  try {
    CmdFit(c, ScratchDir("fit2"), log);
    FAIL() << "expected FitError";
  } catch (const std::exception& e) {
    EXPECT_EQ(ExitCodeFor(e), 3);
  }
}

TEST(CmdFitTest, ExactObservationsFromCsv) {
  const fs::path dir = ScratchDir("fit_csv");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "obs.csv");
    f << "q,eps_star\n";
    for (int i = 1; i <= 40; ++i) {
      const double q = i / 40.0;
      f << FormatDouble(q) << ',' << FormatDouble(std::exp(1.5 * q - 0.2) + 0.3)
        << '\n';
    }
  }
  ExperimentConfig c = ParseConfig("{}");
  c.fit.observations_csv = (dir / "obs.csv").string();
  std::ostringstream log;
  const ExpFit fit = CmdFit(c, dir / "out", log);
  EXPECT_NEAR(fit.a, 1.5, 1e-6);
  EXPECT_NEAR(fit.b, -0.2, 1e-6);
  EXPECT_NEAR(fit.c, 0.3, 1e-6);
  fs::remove_all(dir);
}

ExperimentConfig SmallRunConfig() {
  return ParseConfig(R"({
    "dataset": {"kind": "synthetic", "clients": 3, "records_per_client": 120,
                "features": 4},
    "run": {"seeds": [0, 1, 2, 3, 4], "learning_rate": 0.5, "eval_every": 4},
    "mechanism": {"rounds": 8}})");
}

TEST(CmdRunTest, SummaryShapeAndLedgerCompliance) {
  const fs::path out = ScratchDir("run");
  std::ostringstream log;
  CmdRun(SmallRunConfig(), out, false, log);
  const auto summary = ReadCsv(out / "summary.csv");
  ASSERT_EQ(summary.size(), 21u);
  EXPECT_EQ(summary[0],
            (std::vector<std::string>{"mode", "seed", "final_mean_accuracy"}));
  int ledgers = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ledger_", 0) != 0) continue;
    ++ledgers;
    const auto rows = ReadCsv(entry.path());
    ASSERT_GT(rows.size(), 1u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      EXPECT_LE(std::stod(rows[i][4]), std::stod(rows[i][2])) << name;
    }
  }
  EXPECT_EQ(ledgers, 20);
  // Eight rounds, evaluated on rounds 4 and 8.
  std::ifstream metrics(out / "metrics_rpdp_seed0.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) ++lines;
  EXPECT_EQ(lines, 8);
  fs::remove_all(out);
}

TEST(CmdRunTest, ByteIdenticalReruns) {
  ExperimentConfig c = SmallRunConfig();
  c.run.seeds = {3};
  const fs::path a = ScratchDir("rerun_a"), b = ScratchDir("rerun_b");
  std::ostringstream log;
  CmdRun(c, a, false, log);
  c.run.threads = 3;
  CmdRun(c, b, false, log);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(ReadFile(entry.path()), ReadFile(b / entry.path().filename()))
        << entry.path().filename();
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(CmdRunTest, TimingComparison) {
  ExperimentConfig c = SmallRunConfig();
  c.run.seeds = {0};
  c.run.modes = {TrainingMode::kPrivacyFree};
  const fs::path out = ScratchDir("timing");
  std::ostringstream log;
  CmdRun(c, out, true, log);
  const auto rows = ReadCsv(out / "timing.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "scf");
  EXPECT_EQ(rows[2][0], "binary_search");
  EXPECT_EQ(rows[1][1], "1000");
  fs::remove_all(out);
}

TEST(CmdRunTest, CsvBudgetsRequireEpsilonColumn) {
  const fs::path dir = ScratchDir("csv_budgets");
  fs::create_directories(dir);
  std::ofstream(dir / "c.csv") << "x,target\n1,0\n2,1\n3,0\n4,1\n";
  ExperimentConfig c = ParseConfig(R"({"budgets": {"kind": "csv"}})");
  c.dataset.kind = DatasetSpec::Kind::kCsv;
  c.dataset.paths = {(dir / "c.csv").string()};
  try {
    BuildDataset(c, 0);
    FAIL() << "expected DataError";
  } catch (const std::exception& e) {
    EXPECT_EQ(ExitCodeFor(e), 4);
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace rpdp::cli
