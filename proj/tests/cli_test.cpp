// Copyright 2026 The mtrack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.hpp"
#include "csv.hpp"

#include <gtest/gtest.h>
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace mtrack::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mtsim_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "mtsim");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    out_.str({});
    err_.str({});
    return main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

constexpr const char* kSmall = R"({
  "topology": {"kind": "ring", "n": 6},
  "problem": {"d": 4, "zeta2": 4.0, "sigma2": 0.5, "seed": 3},
  "algorithm": {"variant": "momentum_tracking", "eta": 0.01, "beta": 0.8},
  "rounds": 40, "seed": 2
})";

TEST_F(CliTest, RunWritesOneRowPerRoundPlusStart) {
  const fs::path cfg = write_config("small.json", kSmall);
  ASSERT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0)
      << err_.str();
  std::ifstream csv(dir_ / "out" / "metrics.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kMetricsHeader);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 41);

  const json summary = read_json(dir_ / "out" / "summary.json");
  EXPECT_EQ(summary["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(summary["status"], "completed");
  EXPECT_EQ(summary["config"]["rounds"], 40);
}

TEST_F(CliTest, CadenceOverrideThinsRows) {
  const fs::path cfg = write_config("small.json", kSmall);
  ASSERT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir_ / "out").string(),
                    "--cadence", "15"}),
            0);
  const auto rows = read_metrics_csv(dir_ / "out" / "metrics.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].round, 15);
  EXPECT_EQ(rows[3].round, 40);
}

TEST_F(CliTest, MetricsCsvRoundTripsExactly) {
  std::vector<RoundMetrics> m(3);
  m[0] = {0, 1.0 / 3.0, 1e-300, 0.0, 2.5e-17, std::nextafter(1.0, 2.0), 0};
  m[1] = {1, -0.1, 123456789.123456789, 1e300, 0.0, 4.9e-324, 24};
  m[2] = {2, 0.7, 0.2, 0.3, 0.4, 0.5, 48};
  const fs::path p = dir_ / "m.csv";
  write_metrics_csv(p, m);
  const auto back = read_metrics_csv(p);
  ASSERT_EQ(back.size(), m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    EXPECT_EQ(back[k].round, m[k].round);
    EXPECT_EQ(back[k].f_xbar, m[k].f_xbar);
    EXPECT_EQ(back[k].grad_norm_sq, m[k].grad_norm_sq);
    EXPECT_EQ(back[k].consensus_xi, m[k].consensus_xi);
    EXPECT_EQ(back[k].c_sum_norm, m[k].c_sum_norm);
    EXPECT_EQ(back[k].u_bar_norm, m[k].u_bar_norm);
    EXPECT_EQ(back[k].vectors_tx, m[k].vectors_tx);
  }
}

TEST_F(CliTest, RepeatsWriteSubdirectoriesAndMean) {
  const fs::path cfg = write_config("small.json", kSmall);
  ASSERT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir_ / "out").string(),
                    "--repeats", "3"}),
            0);
  for (int k = 0; k < 3; ++k) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / ("repeat_" + std::to_string(k)) / "metrics.csv"));
  }
  EXPECT_EQ(read_metrics_csv(dir_ / "out" / "metrics_mean.csv").size(), 41u);
}

TEST_F(CliTest, InvalidBetaExitsOneWithMessage) {
  const fs::path cfg =
      write_config("bad.json", R"({"algorithm": {"beta": 1.2}, "rounds": 5})");
  EXPECT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 1);
  EXPECT_NE(err_.str().find("beta must be in [0,1)"), std::string::npos) << err_.str();
}

TEST_F(CliTest, UnknownAxisExitsOne) {
  const fs::path cfg = write_config("small.json", kSmall);
  EXPECT_EQ(invoke({"sweep", "--config", cfg.string(), "--axis", "gamma", "--values", "1,2",
                    "--out", (dir_ / "out").string()}),
            1);
  EXPECT_NE(err_.str().find("gamma"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MissingSubcommandExitsOne) { EXPECT_EQ(invoke({}), 1); }

TEST_F(CliTest, DivergenceExitsTwo) {
  const fs::path cfg = write_config("div.json", R"({
    "topology": {"kind": "ring", "n": 4},
    "problem": {"d": 2, "zeta2": 1.0, "sigma2": 0.0},
    "algorithm": {"variant": "dsgd", "eta": 100.0, "beta": 0.0},
    "rounds": 2000
  })");
  EXPECT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2);
  const json summary = read_json(dir_ / "out" / "summary.json");
  EXPECT_NE(summary["status"].get<std::string>().find("diverged@"), std::string::npos);
}

TEST_F(CliTest, HeterogeneitySweepLayoutAndVerdict) {
  const fs::path cfg = write_config("sweep.json", R"({
    "topology": {"kind": "ring", "n": 8},
    "problem": {"d": 5, "sigma2": 1.0, "seed": 1},
    "algorithm": {"variant": "dsgdm", "eta": 0.002, "beta": 0.9},
    "rounds": 1500, "seed": 4, "cadence": 10
  })");
  const fs::path out = dir_ / "sweep";
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--axis", "zeta2", "--values",
                    "0,25,50", "--repeats", "3", "--out", out.string()}),
            0)
      << err_.str();
  for (const char* v : {"0", "25", "50"}) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_TRUE(fs::exists(out / (std::string("zeta2=") + v) / ("seed_" + std::to_string(k)) /
                             "metrics.csv"));
    }
  }
  const json report = read_json(out / "sweep_report.json");
  EXPECT_EQ(report["runs"].size(), 9u);
  const json& verdict = report["verdict"];
  EXPECT_EQ(verdict["test"], "heterogeneity_independence");
  // Without tracking, the stationary gradient norm grows with heterogeneity.
  EXPECT_EQ(verdict["result"], "FAIL");
  EXPECT_TRUE(verdict["monotone_increasing"].get<bool>());
}

TEST_F(CliTest, SweepWithOneSeedSkipsVerdict) {
  const fs::path cfg = write_config("small.json", kSmall);
  const fs::path out = dir_ / "sweep";
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--axis", "zeta2", "--values", "0,1",
                    "--out", out.string()}),
            0);
  EXPECT_EQ(read_json(out / "sweep_report.json")["verdict"]["result"], "SKIPPED");
}

TEST_F(CliTest, VerifyPassesOnReferenceConfig) {
  const std::string cfg = std::string(MTRACK_SOURCE_DIR) + "/configs/synthetic_reference.json";
  EXPECT_EQ(invoke({"verify", "--config", cfg, "--rounds", "50"}), 0) << out_.str();
  EXPECT_EQ(out_.str().find("FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyDetectsTamperedWeights) {
  RunConfig c = parse_config(kSmall);
  VerifyOptions opt;
  opt.rounds = 20;
  opt.tamper = [](Eigen::MatrixXd& w) { w(0, 0) += 0.01; };
  const auto checks = verify_invariants(c, opt);
  bool named = false;
  for (const auto& chk : checks) {
    if (chk.name == "mixing.double_stochasticity") {
      named = true;
      EXPECT_FALSE(chk.pass);
      EXPECT_NEAR(chk.residual, 0.01, 1e-12);
    }
  }
  EXPECT_TRUE(named);

  const fs::path cfg = write_config("small.json", kSmall);
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(cfg, {}, opt, log), kExitInvariant);
  EXPECT_NE(log.str().find("FAIL mixing.double_stochasticity"), std::string::npos) << log.str();
}

TEST_F(CliTest, BoundUnitExample) {
  ASSERT_EQ(invoke({"bound", "--r0", "1", "--sigma2", "0", "--L", "1", "--p", "1", "--beta", "0",
                    "--n", "1", "--R", "100"}),
            0);
  const json b = json::parse(out_.str());
  EXPECT_EQ(b["term1"], 0.0);
  EXPECT_EQ(b["term2"], 0.0);
  EXPECT_DOUBLE_EQ(b["term3"].get<double>(), 0.01);
  EXPECT_EQ(b["label"], "diagnostic, constants = 1");
}

TEST_F(CliTest, BoundThirdTermHalvesWhenRoundsDouble) {
  ASSERT_EQ(invoke({"bound", "--r0", "2", "--sigma2", "0", "--L", "3", "--p", "0.2", "--beta",
                    "0.5", "--n", "10", "--R", "100"}),
            0);
  const double a = json::parse(out_.str())["term3"].get<double>();
  ASSERT_EQ(invoke({"bound", "--r0", "2", "--sigma2", "0", "--L", "3", "--p", "0.2", "--beta",
                    "0.5", "--n", "10", "--R", "200"}),
            0);
  const double b = json::parse(out_.str())["term3"].get<double>();
  EXPECT_NEAR(a / b, 2.0, 1e-12);
}

TEST_F(CliTest, BoundFromConfigDerivesInputs) {
  const std::string cfg = std::string(MTRACK_SOURCE_DIR) + "/configs/synthetic_reference.json";
  ASSERT_EQ(invoke({"bound", "--config", cfg}), 0) << err_.str();
  const json b = json::parse(out_.str());
  EXPECT_EQ(b["inputs"]["L"], 25.0);
  EXPECT_EQ(b["inputs"]["n"], 25.0);
  EXPECT_EQ(b["inputs"]["R"], 20000.0);
  EXPECT_GT(b["inputs"]["p"].get<double>(), 0.0);
  EXPECT_LT(b["inputs"]["p"].get<double>(), 0.1);
}

TEST_F(CliTest, BoundRejectsBadGap) {
  EXPECT_EQ(invoke({"bound", "--p", "0"}), 1);
}

}  // namespace
}  // namespace mtrack::cli
