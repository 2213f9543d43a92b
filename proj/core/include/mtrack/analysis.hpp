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

#include "mtrack/engine.hpp"

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace mtrack {

/// Inputs to the Momentum Tracking rate bound. There is deliberately no
/// heterogeneity parameter.
struct RateBoundInputs {
  double r0 = 0.0;      // f(x-bar(0)) - f*
  double sigma2 = 0.0;
  double L = 1.0;
  double p = 1.0;       // spectral gap, (0, 1]
  double beta = 0.0;    // [0, 1)
  double n = 1.0;       // node count
  double R = 1.0;       // rounds

  void validate() const;
};

/// The three structural terms of the O(.) bound with every hidden constant
/// set to 1. Diagnostic only: shows scaling, not a guarantee.
///   term1 = sqrt(r0 s2 L / (n R))
///   term2 = cbrt(r0^2 s2 L^2 / (p^4 R^2 (1-b)) * (1 + p b^2 / (1-b)))
///   term3 = L r0 / ((1-b) p^2 R) * sqrt(1 + b^2 / ((1-b^2)^3 p))
struct RateBound {
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
  double total = 0.0;
};

RateBound mt_rate_bound(const RateBoundInputs& in);

/// Step size under which the convergence proof goes through:
/// (1-b)^2 p^2 / (16 L sqrt(7836 b^2 / ((1-b^2)^3 p) + 282)).
double admissible_step_size(double L, double p, double beta);

/// Mean of grad_norm_sq over the last `window_fraction` of recorded rounds
/// (at least one sample, round 0 excluded when possible).
double tail_mean_grad_norm_sq(const RunResult& result, double window_fraction = 0.1);

struct IndependenceVerdict {
  bool pass = false;
  double ratio = 1.0;             // max/min of per-level means
  double threshold = 1.5;
  double window_fraction = 0.1;
  std::map<double, double> level_means;  // zeta2 -> mean tail grad_norm_sq
  bool monotone_increasing = false;      // strictly, in zeta2 order
  double extreme_ratio = 1.0;            // mean(max zeta2) / mean(min zeta2)
};

/// PASS when max/min of the per-level tail means is <= threshold. Requires
/// >= 2 levels, >= 3 runs per level and equal metric lengths; throws
/// ConfigError otherwise.
IndependenceVerdict heterogeneity_independence_test(
    const std::map<double, std::vector<RunResult>>& results_by_zeta2,
    double window_fraction = 0.1, double threshold = 1.5);

/// Replays u-bar <- beta u-bar + g-bar, x-bar <- x-bar - eta u-bar from logged
/// per-round gradients (d x n each). Returns R + 1 entries, the first being
/// x0. Never looks at the topology.
std::vector<Eigen::VectorXd> reference_sgdm_xbar(
    const std::vector<Eigen::MatrixXd>& gradients, double eta, double beta,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& ubar0);

/// Overload starting from u-bar = 0, which holds under both init modes.
std::vector<Eigen::VectorXd> reference_sgdm_xbar(
    const std::vector<Eigen::MatrixXd>& gradients, double eta, double beta,
    const Eigen::VectorXd& x0);

/// max_r ||a_r - b_r|| / max(1, ||b_r||). Throws on length mismatch.
double max_relative_deviation(const std::vector<Eigen::VectorXd>& a,
                              const std::vector<Eigen::VectorXd>& b);

}  // namespace mtrack
