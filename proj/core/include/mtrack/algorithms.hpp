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

#include "mtrack/problem.hpp"
#include "mtrack/random.hpp"
#include "mtrack/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace mtrack {

enum class Variant { kDsgd, kDsgdm, kGradientTracking, kMomentumTracking };
enum class InitMode { kTheorem, kZero };

/// "dsgd", "dsgdm", "gradient_tracking", "momentum_tracking".
std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view name);
/// "theorem", "zero".
std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct AlgorithmSpec {
  Variant variant = Variant::kMomentumTracking;
  double eta = 1e-4;
  double beta = 0.9;
  InitMode init = InitMode::kTheorem;

  /// Throws ConfigError unless eta > 0 (or == 0 when allow_zero_eta) and
  /// beta is in [0, 1).
  void validate(bool allow_zero_eta = false) const;

  /// Momentum coefficient actually used: 0 for GradientTracking and DSGD.
  double effective_beta() const noexcept;
  bool uses_tracking() const noexcept {
    return variant == Variant::kMomentumTracking || variant == Variant::kGradientTracking;
  }
};

/// One node's (x, u, c).
struct NodeState {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd c;
};

/// Column-stacked swarm: column i of x/u/c belongs to node i.
struct SwarmState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
  Eigen::MatrixXd c;
  std::int64_t round = 0;

  int nodes() const noexcept { return static_cast<int>(x.cols()); }
  int dim() const noexcept { return static_cast<int>(x.rows()); }
  NodeState node(int i) const { return {x.col(i), u.col(i), c.col(i)}; }
};

/// Every x_i = x0. Under TheoremInit for the tracking variants,
/// u_i = c_i = (g_i - mean_j g_j) / (1 - beta) with g_i drawn from the
/// round-0 Purpose::kInit stream of node i. Otherwise u = c = 0.
SwarmState init_swarm(const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                      const Eigen::VectorXd& x0, const RandomSource& source);

/// Per-node stochastic gradients at the pre-step iterates, one column per
/// node, drawn from the (node, round, kGradient) streams.
Eigen::MatrixXd sample_gradients(const ObjectiveSuite& problem, const Eigen::MatrixXd& x,
                                 std::int64_t round, const RandomSource& source);

// Each step consumes a state at round r and returns round r + 1. When
// `gradients` is non-null it receives the stochastic gradients used.
// A non-finite coordinate in the result throws DivergenceError.

/// x_i <- sum_j W_ij (x_j - eta g_j).
SwarmState step_dsgd(const SwarmState& state, const MixingMatrix& w,
                     const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                     const RandomSource& source, Eigen::MatrixXd* gradients = nullptr);

/// u_i <- beta u_i + g_i;  x_i <- sum_j W_ij (x_j - eta u_j).
SwarmState step_dsgdm(const SwarmState& state, const MixingMatrix& w,
                      const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                      const RandomSource& source, Eigen::MatrixXd* gradients = nullptr);

/// u_i <- beta u_i + g_i
/// x_i <- sum_j W_ij x_j - eta (u_i - c_i)          (old c)
/// c_i <- sum_j W_ij (c_j - u_j) + u_i              (old c, new u)
/// GradientTracking runs this with beta = 0.
SwarmState step_momentum_tracking(const SwarmState& state, const MixingMatrix& w,
                                  const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                                  const RandomSource& source,
                                  Eigen::MatrixXd* gradients = nullptr);

/// Dispatches on spec.variant.
SwarmState step(const SwarmState& state, const MixingMatrix& w,
                const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                const RandomSource& source, Eigen::MatrixXd* gradients = nullptr);

/// (1/n) sum_i x_i.
Eigen::VectorXd average_iterate(const SwarmState& state);

/// Vectors sent over all links in one round: every node sends one vector per
/// neighbor (x, or x - eta u for DSGDm), and tracking variants send a second
/// one (c - u).
std::int64_t vectors_per_round(Variant variant, const Graph& g);

}  // namespace mtrack
