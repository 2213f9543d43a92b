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

#include "mtrack/algorithms.hpp"
#include "mtrack/problem.hpp"
#include "mtrack/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mtrack {

struct TopologyConfig {
  TopologyKind kind = TopologyKind::kRing;
  int n = 25;
  WeightScheme scheme = WeightScheme::kMetropolis;
};

struct ProblemConfig {
  int d = 50;
  double zeta2 = 0.0;
  double sigma2 = 1.0;
  std::uint64_t seed = 0;
  /// When set, the problem is loaded from this file instead of generated;
  /// d/zeta2/seed are then taken from the file and sigma2 from this config.
  std::optional<std::string> file;
};

struct StartPoint {
  enum class Mode { kZeros, kVector, kSphere };
  Mode mode = Mode::kZeros;
  std::vector<double> values;  // kVector
  double radius = 1.0;         // kSphere
  std::uint64_t seed = 0;      // kSphere
};

struct RunConfig {
  TopologyConfig topology;
  ProblemConfig problem;
  AlgorithmSpec algorithm;
  std::int64_t rounds = 20000;
  std::uint64_t seed = 0;
  std::int64_t cadence = 1;
  StartPoint x0;

  /// Throws ConfigError naming the first invalid field. eta = 0 is accepted
  /// (gossip-only runs).
  void validate() const;
};

struct RoundMetrics {
  std::int64_t round = 0;
  double f_xbar = 0.0;
  double grad_norm_sq = 0.0;
  double consensus_xi = 0.0;
  double c_sum_norm = 0.0;
  double u_bar_norm = 0.0;
  std::int64_t vectors_tx = 0;
};

struct RunStatus {
  bool completed = true;
  std::int64_t diverged_round = -1;
  std::string message;

  std::string to_string() const;
};

struct RunResult {
  RunConfig config;
  std::vector<RoundMetrics> metrics;
  Eigen::VectorXd final_xbar;
  std::optional<double> distance_to_minimizer;
  RunStatus status;
  /// Filled only when RunOptions ask for it. xbar_history[r] is x-bar after
  /// r rounds; gradient_history[r] holds the gradients used in round r + 1.
  std::vector<Eigen::VectorXd> xbar_history;
  std::vector<Eigen::VectorXd> ubar_history;
  std::vector<Eigen::MatrixXd> gradient_history;
};

struct RunOptions {
  bool keep_xbar = false;
  bool keep_gradients = false;
};

/// Everything a run needs, materialized from a config.
struct RunSetup {
  Graph graph;
  MixingMatrix mixing;
  std::shared_ptr<const QuadraticProblem> problem;
  Eigen::VectorXd x0;
};

RunSetup make_setup(const RunConfig& config);

/// (1/n) sum_i ||x_i - x-bar||^2.
double consensus_distance(const SwarmState& state);

RoundMetrics measure_round(const SwarmState& state, const ObjectiveSuite& problem,
                           std::int64_t vectors_tx);

/// init_swarm followed by config.rounds steps; metrics at every cadence-th
/// round plus rounds 0 and R. Divergence ends the run early with
/// status.completed = false; the metrics recorded so far are kept.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// Same, on a prebuilt setup (shared by sweeps and the verify battery).
RunResult run(const RunConfig& config, const RunSetup& setup,
              const RunOptions& options = {});

enum class SweepAxis { kZeta2, kBeta, kEta, kTopology, kVariant, kSigma2, kN };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// Copy of `base` with one axis set from its textual value. Throws
/// ConfigError for values invalid on that axis.
RunConfig apply_axis(const RunConfig& base, SweepAxis axis, const std::string& value);

/// Seed for (value, repeat): hash of base seed, axis name, value and repeat.
std::uint64_t derive_seed(std::uint64_t base, SweepAxis axis, const std::string& value,
                          int repeat);

struct SweepPoint {
  std::string value;
  int repeat = 0;
  RunResult result;
};

/// One run per (value, repeat), repeats >= 1. All configs are built and
/// validated before any run starts. workers = 0 means hardware concurrency.
/// Results come back in (value, repeat) order regardless of scheduling.
std::vector<SweepPoint> sweep(const RunConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values, int repeats = 1,
                              unsigned workers = 0);

}  // namespace mtrack
