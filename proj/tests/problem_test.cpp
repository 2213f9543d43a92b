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


#include "mtrack/problem.hpp"

#include "mtrack/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

namespace mtrack {
namespace {

Eigen::VectorXd random_vector(int d, std::uint64_t seed) {
  RandomStream s(seed, 0, 0, Purpose::kTest);
  Eigen::VectorXd v(d);
  for (int k = 0; k < d; ++k) v(k) = s.normal();
  return v;
}

TEST(SynthQuadratic, ZeroHeterogeneityHasZeroTargets) {
  const QuadraticProblem p = synth_quadratic(50, 25, 0.0, 1.0, 123);
  EXPECT_EQ(p.b().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.global_minimizer().cwiseAbs().maxCoeff(), 0.0);
}

TEST(SynthQuadratic, ReferenceShape) {
  const QuadraticProblem p = synth_quadratic(50, 25, 25.0, 1.0, 9);
  EXPECT_EQ(p.dim(), 50);
  EXPECT_EQ(p.nodes(), 25);
  for (int i = 0; i < 25; ++i) EXPECT_DOUBLE_EQ(p.a()(i), (i + 1) / 5.0);
  EXPECT_DOUBLE_EQ(p.smoothness(), 25.0);
  EXPECT_EQ(p.metadata().zeta2, 25.0);
  EXPECT_EQ(p.metadata().seed, 9u);
}

TEST(SynthQuadratic, TargetVarianceScalesAsZetaOverIndexSquared) {
  // Monte Carlo over regenerations with many seeds. The mean of b is known
  // to be zero, so mean(b^2) estimates the variance with standard error
  // sqrt(2) * var / sqrt(samples).
  constexpr int kRegenerations = 100000;
  constexpr int kD = 8, kN = 4;
  constexpr double kZeta2 = 9.0;
  std::vector<double> sum_sq(kN, 0.0);
  for (int s = 0; s < kRegenerations; ++s) {
    const QuadraticProblem p = synth_quadratic(kD, kN, kZeta2, 0.0, 1000 + s);
    for (int i = 0; i < kN; ++i) sum_sq[i] += p.b().col(i).squaredNorm();
  }
  for (int i = 0; i < kN; ++i) {
    const double samples = static_cast<double>(kRegenerations) * kD;
    const double expected = kZeta2 / ((i + 1.0) * (i + 1.0));
    const double estimate = sum_sq[i] / samples;
    const double stderr_ = std::sqrt(2.0) * expected / std::sqrt(samples);
    EXPECT_LT(std::abs(estimate - expected), 3.0 * stderr_) << "node " << i + 1;
  }
}

TEST(SynthQuadratic, RejectsBadArguments) {
  EXPECT_THROW(synth_quadratic(0, 3, 1.0, 1.0, 0), ConfigError);
  EXPECT_THROW(synth_quadratic(3, 0, 1.0, 1.0, 0), ConfigError);
  EXPECT_THROW(synth_quadratic(3, 3, -1.0, 1.0, 0), ConfigError);
  EXPECT_THROW(synth_quadratic(3, 3, 1.0, -1.0, 0), ConfigError);
}

TEST(FullGradient, ZeroAtOriginWithoutHeterogeneity) {
  const QuadraticProblem p = synth_quadratic(5, 4, 0.0, 1.0, 1);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(p.local_gradient(i, Eigen::VectorXd::Zero(5)).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(FullGradient, ZeroAtPerNodeMinimizer) {
  const QuadraticProblem p = synth_quadratic(6, 5, 4.0, 1.0, 2);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd xi = p.b().col(i) / p.a()(i);
    EXPECT_LE(p.local_gradient(i, xi).norm(), 1e-14 * (1.0 + xi.norm()));
  }
}

TEST(FullGradient, LastReferenceNodeAtOnes) {
  const QuadraticProblem p = synth_quadratic(50, 25, 25.0, 1.0, 3);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(50);
  const Eigen::VectorXd expected = 25.0 * ones - 5.0 * p.b().col(24);
  EXPECT_LE((p.local_gradient(24, ones) - expected).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::VectorXd fd = oracle::finite_difference_gradient(
      [&](const Eigen::VectorXd& x) { return p.local_value(24, x); }, ones);
  EXPECT_LE((fd - expected).norm(), 1e-5 * expected.norm());
}

TEST(FullGradient, MatchesFiniteDifferencesOnRandomInputs) {
  const QuadraticProblem p = synth_quadratic(7, 6, 10.0, 1.0, 4);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = random_vector(7, 50 + t);
    const int i = t % 6;
    const Eigen::VectorXd g = p.local_gradient(i, x);
    const Eigen::VectorXd fd = oracle::finite_difference_gradient(
        [&](const Eigen::VectorXd& y) { return p.local_value(i, y); }, x);
    EXPECT_LE((fd - g).norm(), 1e-5 * std::max(1.0, g.norm()));
  }
}

TEST(FullGradient, LipschitzWithPerNodeConstant) {
  const QuadraticProblem p = synth_quadratic(5, 8, 3.0, 1.0, 5);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd x = random_vector(5, 100 + t);
    const Eigen::VectorXd y = random_vector(5, 200 + t);
    for (int i = 0; i < 8; ++i) {
      const double ai2 = p.a()(i) * p.a()(i);
      EXPECT_LE((p.local_gradient(i, x) - p.local_gradient(i, y)).norm(),
                ai2 * (x - y).norm() * (1.0 + 1e-12));
    }
  }
}

TEST(StochasticGradient, NoiselessEqualsFullGradientExactly) {
  const QuadraticProblem p = synth_quadratic(10, 4, 5.0, 0.0, 6);
  const Eigen::VectorXd x = random_vector(10, 1);
  RandomStream s(1, 2, 3, Purpose::kGradient);
  const Eigen::VectorXd g = p.stochastic_gradient(2, x, s);
  const Eigen::VectorXd f = p.local_gradient(2, x);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(g(k), f(k));
}

TEST(StochasticGradient, SameKeySameOutput) {
  const QuadraticProblem p = synth_quadratic(10, 4, 5.0, 1.0, 6);
  const Eigen::VectorXd x = random_vector(10, 1);
  RandomStream a(11, 1, 7, Purpose::kGradient);
  RandomStream b(11, 1, 7, Purpose::kGradient);
  const Eigen::VectorXd ga = p.stochastic_gradient(1, x, a);
  const Eigen::VectorXd gb = p.stochastic_gradient(1, x, b);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(ga(k), gb(k));
}

TEST(StochasticGradient, NoiseEnergyMatchesSigma2) {
  // Var(||eps||^2) = 2 sigma^4 / d.
  constexpr int kDraws = 100000;
  constexpr int kD = 50;
  const QuadraticProblem p = synth_quadratic(kD, 3, 2.0, 1.0, 7);
  const Eigen::VectorXd x = random_vector(kD, 2);
  const Eigen::VectorXd exact = p.local_gradient(1, x);
  double total = 0.0;
  for (int r = 0; r < kDraws; ++r) {
    RandomStream s(8, 1, static_cast<std::uint64_t>(r), Purpose::kGradient);
    total += (p.stochastic_gradient(1, x, s) - exact).squaredNorm();
  }
  const double mean = total / kDraws;
  const double stderr_ = std::sqrt(2.0 / kD / kDraws);
  EXPECT_LT(std::abs(mean - 1.0), 3.0 * stderr_);
}

TEST(StochasticGradient, Unbiased) {
  constexpr int kDraws = 100000;
  constexpr int kD = 6;
  constexpr double kSigma2 = 3.0;
  const QuadraticProblem p = synth_quadratic(kD, 3, 2.0, kSigma2, 7);
  const Eigen::VectorXd x = random_vector(kD, 3);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(kD);
  for (int r = 0; r < kDraws; ++r) {
    RandomStream s(9, 2, static_cast<std::uint64_t>(r), Purpose::kGradient);
    sum += p.stochastic_gradient(2, x, s);
  }
  const Eigen::VectorXd mean = sum / kDraws;
  const Eigen::VectorXd exact = p.local_gradient(2, x);
  const double stderr_ = std::sqrt(kSigma2 / kD / kDraws);
  for (int k = 0; k < kD; ++k) EXPECT_LT(std::abs(mean(k) - exact(k)), 4.0 * stderr_);
}

TEST(GlobalGradient, ClosedFormMatchesDirectSum) {
  const QuadraticProblem p = synth_quadratic(9, 7, 12.0, 1.0, 10);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = random_vector(9, 300 + t);
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(9);
    for (int i = 0; i < 7; ++i) direct += p.local_gradient(i, x);
    direct /= 7.0;
    EXPECT_LE((p.gradient(x) - direct).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(synth_quadratic(4, 3, 0.0, 1.0, 1).gradient(Eigen::VectorXd::Zero(4)).norm(), 0.0);
}

TEST(GlobalMinimizer, StationaryAndMatchesNormalEquations) {
  const QuadraticProblem p = synth_quadratic(50, 25, 25.0, 1.0, 11);
  const Eigen::VectorXd xstar = p.global_minimizer();
  EXPECT_LE(p.gradient(xstar).norm(), 1e-10 * (1.0 + xstar.norm()));
  const Eigen::VectorXd dense = oracle::normal_equations_minimizer(p.a(), p.b());
  EXPECT_LE((xstar - dense).norm(), 1e-10 * dense.norm());
}

TEST(GlobalMinimizer, SingleUnitNodeIsItsTarget) {
  const QuadraticProblem p = synth_quadratic(4, 1, 5.0, 0.0, 12);
  EXPECT_DOUBLE_EQ(p.a()(0), 1.0);
  EXPECT_LE((p.global_minimizer() - p.b().col(0)).norm(), 1e-15);
}

TEST(GlobalMinimizer, DegenerateProblemThrows) {
  const QuadraticProblem p(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Ones(2, 3), 0.0);
  EXPECT_THROW(p.global_minimizer(), ConfigError);
}

TEST(Heterogeneity, ZeroAtOriginWithoutTargets) {
  const QuadraticProblem p = synth_quadratic(5, 6, 0.0, 1.0, 1);
  EXPECT_EQ(measure_heterogeneity(p, Eigen::VectorXd::Zero(5)), 0.0);
  // Away from the origin the a_i^2 x terms differ across nodes.
  EXPECT_GT(measure_heterogeneity(p, Eigen::VectorXd::Ones(5)), 0.0);
}

TEST(Heterogeneity, LargerZetaGivesLargerMeasureAtOrigin) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const QuadraticProblem hetero = synth_quadratic(50, 25, 25.0, 1.0, seed);
    const QuadraticProblem homo = synth_quadratic(50, 25, 0.0, 1.0, seed);
    EXPECT_GT(measure_heterogeneity(hetero, Eigen::VectorXd::Zero(50)),
              measure_heterogeneity(homo, Eigen::VectorXd::Zero(50)));
  }
}

TEST(Heterogeneity, IdenticalNodesGiveZero) {
  Eigen::MatrixXd b(3, 4);
  b.colwise() = Eigen::Vector3d(1.0, -2.0, 0.5);
  const QuadraticProblem p(Eigen::VectorXd::Constant(4, 0.7), b, 1.0);
  for (int t = 0; t < 5; ++t) {
    EXPECT_NEAR(measure_heterogeneity(p, random_vector(3, 40 + t)), 0.0, 1e-28);
  }
}

TEST(ProblemFile, SaveLoadIsExact) {
  const QuadraticProblem p = synth_quadratic(7, 5, 13.0, 0.25, 99);
  const auto path = std::filesystem::temp_directory_path() / "mtrack_problem_roundtrip.txt";
  save_problem(p, path);
  const QuadraticProblem q = load_problem(path);
  EXPECT_EQ(q.dim(), 7);
  EXPECT_EQ(q.nodes(), 5);
  EXPECT_EQ(q.sigma2(), 0.25);
  EXPECT_EQ(q.metadata().zeta2, 13.0);
  EXPECT_EQ(q.metadata().seed, 99u);
  EXPECT_TRUE((q.a().array() == p.a().array()).all());
  EXPECT_TRUE((q.b().array() == p.b().array()).all());
  std::filesystem::remove(path);
}

TEST(ProblemFile, RejectsGarbage) {
  const auto path = std::filesystem::temp_directory_path() / "mtrack_problem_garbage.txt";
  {
    std::ofstream out(path);
    out << "not a problem\n";
  }
  EXPECT_THROW(load_problem(path), ConfigError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace mtrack
