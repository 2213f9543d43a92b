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


#pragma once

#include "mtrack/analysis.hpp"
#include "mtrack/config.hpp"
#include "mtrack/engine.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mtrack::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitDiverged = 2,
  kExitInvariant = 3,
};

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kOutRootEnv = "MTSIM_OUT_ROOT";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> cadence;
};

/// Applies --seed/--cadence on top of a loaded config and revalidates.
RunConfig apply_overrides(RunConfig config, const Overrides& overrides);

/// Writes metrics.csv and summary.json for one run into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result);

/// repeats == 1: <out>/metrics.csv and <out>/summary.json.
/// repeats > 1: one <out>/repeat_<k>/ per repeat plus <out>/metrics_mean.csv
/// and an aggregate <out>/summary.json.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            const Overrides& overrides, int repeats, std::ostream& log);

/// One <out>/<axis>=<value>/seed_<k>/ per run, plus <out>/sweep_report.json
/// (with the heterogeneity-independence verdict when axis is zeta2).
int cmd_sweep(const std::filesystem::path& config_path, const std::string& axis,
              const std::vector<std::string>& values, const std::filesystem::path& out_dir,
              const Overrides& overrides, int repeats, unsigned workers, std::ostream& log);

struct VerifyOptions {
  std::int64_t rounds = 200;
  int contraction_samples = 200;
  /// Test hook: edits the dense mixing weights before any check runs.
  std::function<void(Eigen::MatrixXd&)> tamper;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

/// The invariant battery behind `mtsim verify`.
std::vector<CheckResult> verify_invariants(const RunConfig& config,
                                           const VerifyOptions& options);

int cmd_verify(const std::filesystem::path& config_path, const Overrides& overrides,
               const VerifyOptions& options, std::ostream& log);

/// Bound inputs derived from a config: r0 from the problem at x0, L from
/// the problem, p from the mixing matrix, R from rounds.
RateBoundInputs bound_inputs_from_config(const RunConfig& config);

/// JSON report of the three bound terms.
std::string bound_report_json(const RateBoundInputs& inputs);

/// Full command-line entry point. Returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mtrack::cli
