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


#include "mtrack/analysis.hpp"

#include "mtrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace mtrack {

void RateBoundInputs::validate() const {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(r0)) throw ConfigError("r0 must be finite and >= 0");
  if (!nonneg(sigma2)) throw ConfigError("sigma2 must be finite and >= 0");
  if (!nonneg(L)) throw ConfigError("L must be finite and >= 0");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p must be in (0,1]");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  if (!(n >= 1.0) || !std::isfinite(n)) throw ConfigError("n must be >= 1");
  if (!(R >= 1.0) || !std::isfinite(R)) throw ConfigError("R must be >= 1");
}

RateBound mt_rate_bound(const RateBoundInputs& in) {
  in.validate();
  const double b = in.beta;
  const double one_minus_b = 1.0 - b;
  RateBound out;
  out.term1 = std::sqrt(in.r0 * in.sigma2 * in.L / (in.n * in.R));
  out.term2 = std::cbrt(in.r0 * in.r0 * in.sigma2 * in.L * in.L /
                        (std::pow(in.p, 4) * in.R * in.R * one_minus_b) *
                        (1.0 + in.p * b * b / one_minus_b));
  const double one_minus_b2 = 1.0 - b * b;
  out.term3 = in.L * in.r0 / (one_minus_b * in.p * in.p * in.R) *
              std::sqrt(1.0 + b * b / (std::pow(one_minus_b2, 3) * in.p));
  out.total = out.term1 + out.term2 + out.term3;
  return out;
}

double admissible_step_size(double L, double p, double beta) {
  if (!(L > 0.0)) throw ConfigError("L must be > 0");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p must be in (0,1]");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  const double one_minus_b2 = 1.0 - beta * beta;
  const double root =
      std::sqrt(7836.0 * beta * beta / (std::pow(one_minus_b2, 3) * p) + 282.0);
  return std::pow(1.0 - beta, 2) * p * p / (16.0 * L * root);
}

double tail_mean_grad_norm_sq(const RunResult& result, double window_fraction) {
  const auto& m = result.metrics;
  if (m.empty()) throw ConfigError("run has no metrics");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw ConfigError("window fraction must be in (0,1]");
  }
  const std::size_t usable = m.size() > 1 ? m.size() - 1 : 1;
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(usable))));
  double total = 0.0;
  for (std::size_t k = m.size() - window; k < m.size(); ++k) total += m[k].grad_norm_sq;
  return total / static_cast<double>(window);
}

IndependenceVerdict heterogeneity_independence_test(
    const std::map<double, std::vector<RunResult>>& results_by_zeta2,
    double window_fraction, double threshold) {
  if (results_by_zeta2.size() < 2) {
    throw ConfigError("independence test needs at least two zeta2 levels");
  }
  std::optional<std::size_t> length;
  IndependenceVerdict verdict;
  verdict.threshold = threshold;
  verdict.window_fraction = window_fraction;
  for (const auto& [zeta2, runs] : results_by_zeta2) {
    if (runs.size() < 3) {
      throw ConfigError("independence test needs at least three runs per zeta2 level");
    }
    double level_total = 0.0;
    for (const auto& r : runs) {
      if (!length) length = r.metrics.size();
      if (r.metrics.size() != *length) {
        throw ConfigError("independence test: metric series have different lengths");
      }
      level_total += tail_mean_grad_norm_sq(r, window_fraction);
    }
    verdict.level_means[zeta2] = level_total / static_cast<double>(runs.size());
  }

  double lo = verdict.level_means.begin()->second;
  double hi = lo;
  verdict.monotone_increasing = true;
  double previous = -1.0;
  bool first = true;
  for (const auto& [zeta2, mean] : verdict.level_means) {
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    if (!first && !(mean > previous)) verdict.monotone_increasing = false;
    previous = mean;
    first = false;
  }
  verdict.ratio = hi / lo;
  verdict.extreme_ratio =
      verdict.level_means.rbegin()->second / verdict.level_means.begin()->second;
  verdict.pass = verdict.ratio <= threshold;
  return verdict;
}

std::vector<Eigen::VectorXd> reference_sgdm_xbar(
    const std::vector<Eigen::MatrixXd>& gradients, double eta, double beta,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& ubar0) {
  if (ubar0.size() != x0.size()) throw ConfigError("replay: u-bar has the wrong size");
  std::vector<Eigen::VectorXd> xbar;
  xbar.reserve(gradients.size() + 1);
  xbar.push_back(x0);
  Eigen::VectorXd ubar = ubar0;
  for (const auto& g : gradients) {
    if (g.rows() != x0.size()) throw ConfigError("replay: gradient log has the wrong dimension");
    ubar = beta * ubar + g.rowwise().mean();
    xbar.push_back(xbar.back() - eta * ubar);
  }
  return xbar;
}

std::vector<Eigen::VectorXd> reference_sgdm_xbar(
    const std::vector<Eigen::MatrixXd>& gradients, double eta, double beta,
    const Eigen::VectorXd& x0) {
  return reference_sgdm_xbar(gradients, eta, beta, x0, Eigen::VectorXd::Zero(x0.size()));
}

double max_relative_deviation(const std::vector<Eigen::VectorXd>& a,
                              const std::vector<Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw ConfigError("series lengths differ");
  double worst = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    worst = std::max(worst, (a[r] - b[r]).norm() / std::max(1.0, b[r].norm()));
  }
  return worst;
}

}  // namespace mtrack
