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

#include "mtrack/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>

namespace mtrack {

/// Per-node objectives f_i on R^d with exact and stochastic gradients.
/// Node indices are 0-based. Implementations are immutable after
/// construction and safe to share between threads.
class ObjectiveSuite {
 public:
  virtual ~ObjectiveSuite() = default;

  virtual int nodes() const = 0;
  virtual int dim() const = 0;
  /// max_i L_i, the Lipschitz constant of every local gradient.
  virtual double smoothness() const = 0;

  virtual double local_value(int node, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd local_gradient(int node, const Eigen::VectorXd& x) const = 0;
  /// Unbiased estimate of local_gradient drawn from `stream`.
  virtual Eigen::VectorXd stochastic_gradient(int node, const Eigen::VectorXd& x,
                                              RandomStream& stream) const = 0;

  /// f(x) = (1/n) sum_i f_i(x).
  virtual double value(const Eigen::VectorXd& x) const;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  /// Global minimizer when it is known in closed form.
  virtual std::optional<Eigen::VectorXd> minimizer() const { return std::nullopt; }
};

/// (1/n) sum_i ||grad f_i(x) - grad f(x)||^2.
double measure_heterogeneity(const ObjectiveSuite& suite, const Eigen::VectorXd& x);

/// Generation parameters recorded alongside a synthetic problem.
struct ProblemMetadata {
  double zeta2 = 0.0;
  std::uint64_t seed = 0;
};

/// f_i(x) = 0.5 * ||a_i x - b_i||^2 with scalar a_i = (i + 1) / sqrt(n) for
/// 0-based node i, and stochastic gradients grad f_i(x) + eps with
/// eps ~ N(0, sigma2 / d * I).
class QuadraticProblem final : public ObjectiveSuite {
 public:
  /// a has n entries, b is d x n (column i is b_i).
  QuadraticProblem(Eigen::VectorXd a, Eigen::MatrixXd b, double sigma2,
                   ProblemMetadata meta = {});

  int nodes() const override { return static_cast<int>(a_.size()); }
  int dim() const override { return static_cast<int>(b_.rows()); }
  double smoothness() const override { return a_.array().square().maxCoeff(); }

  double local_value(int node, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd local_gradient(int node, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd stochastic_gradient(int node, const Eigen::VectorXd& x,
                                      RandomStream& stream) const override;
  double value(const Eigen::VectorXd& x) const override;
  /// Closed form: mean(a^2) * x - mean_i(a_i b_i).
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  std::optional<Eigen::VectorXd> minimizer() const override { return global_minimizer(); }

  /// x* = sum_i a_i b_i / sum_i a_i^2. Throws ConfigError if every a_i is 0.
  Eigen::VectorXd global_minimizer() const;

  const Eigen::VectorXd& a() const noexcept { return a_; }
  const Eigen::MatrixXd& b() const noexcept { return b_; }
  double sigma2() const noexcept { return sigma2_; }
  const ProblemMetadata& metadata() const noexcept { return meta_; }

  /// Same objectives with a different gradient-noise level.
  QuadraticProblem with_sigma2(double sigma2) const;

 private:
  Eigen::VectorXd a_;
  Eigen::MatrixXd b_;
  double sigma2_;
  ProblemMetadata meta_;
  double mean_a2_;
  Eigen::VectorXd mean_ab_;
};

/// The synthetic heterogeneous benchmark: a_i = i / sqrt(n) (1-based i) and
/// each coordinate of b_i ~ N(0, zeta2 / i^2).
QuadraticProblem synth_quadratic(int d, int n, double zeta2, double sigma2,
                                 std::uint64_t seed);

/// Text dump: header line, then one row per node "a_i b_i[0] ... b_i[d-1]".
/// Values are written with 17 significant digits so a reload is exact.
void save_problem(const QuadraticProblem& problem, const std::filesystem::path& path);
QuadraticProblem load_problem(const std::filesystem::path& path);

}  // namespace mtrack
