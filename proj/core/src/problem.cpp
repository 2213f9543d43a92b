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

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace mtrack {

double ObjectiveSuite::value(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (int i = 0; i < nodes(); ++i) total += local_value(i, x);
  return total / nodes();
}

Eigen::VectorXd ObjectiveSuite::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < nodes(); ++i) total += local_gradient(i, x);
  return total / nodes();
}

double measure_heterogeneity(const ObjectiveSuite& suite, const Eigen::VectorXd& x) {
  const Eigen::VectorXd global = suite.gradient(x);
  double total = 0.0;
  for (int i = 0; i < suite.nodes(); ++i) {
    total += (suite.local_gradient(i, x) - global).squaredNorm();
  }
  return total / suite.nodes();
}

QuadraticProblem::QuadraticProblem(Eigen::VectorXd a, Eigen::MatrixXd b,
                                   double sigma2, ProblemMetadata meta)
    : a_(std::move(a)), b_(std::move(b)), sigma2_(sigma2), meta_(meta) {
  if (a_.size() < 1) throw ConfigError("problem needs at least one node");
  if (b_.cols() != a_.size()) throw ConfigError("b must have one column per node");
  if (b_.rows() < 1) throw ConfigError("dimension d must be >= 1");
  if (!(sigma2_ >= 0.0) || !std::isfinite(sigma2_)) {
    throw ConfigError("sigma2 must be finite and >= 0");
  }
  const double n = static_cast<double>(a_.size());
  mean_a2_ = a_.squaredNorm() / n;
  mean_ab_ = (b_ * a_) / n;
}

double QuadraticProblem::local_value(int node, const Eigen::VectorXd& x) const {
  return 0.5 * (a_(node) * x - b_.col(node)).squaredNorm();
}

Eigen::VectorXd QuadraticProblem::local_gradient(int node, const Eigen::VectorXd& x) const {
  const double ai = a_(node);
  return (ai * ai) * x - ai * b_.col(node);
}

Eigen::VectorXd QuadraticProblem::stochastic_gradient(int node, const Eigen::VectorXd& x,
                                                      RandomStream& stream) const {
  Eigen::VectorXd g = local_gradient(node, x);
  if (sigma2_ == 0.0) return g;
  const double scale = std::sqrt(sigma2_ / static_cast<double>(dim()));
  for (Eigen::Index k = 0; k < g.size(); ++k) g(k) += scale * stream.normal();
  return g;
}

double QuadraticProblem::value(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (int i = 0; i < nodes(); ++i) total += local_value(i, x);
  return total / nodes();
}

Eigen::VectorXd QuadraticProblem::gradient(const Eigen::VectorXd& x) const {
  return mean_a2_ * x - mean_ab_;
}

Eigen::VectorXd QuadraticProblem::global_minimizer() const {
  const double sum_a2 = a_.squaredNorm();
  if (sum_a2 == 0.0) throw ConfigError("degenerate problem: every a_i is zero");
  return (b_ * a_) / sum_a2;
}

QuadraticProblem QuadraticProblem::with_sigma2(double sigma2) const {
  return QuadraticProblem(a_, b_, sigma2, meta_);
}

QuadraticProblem synth_quadratic(int d, int n, double zeta2, double sigma2,
                                 std::uint64_t seed) {
  if (d < 1) throw ConfigError("dimension d must be >= 1");
  if (n < 1) throw ConfigError("node count n must be >= 1");
  if (!(zeta2 >= 0.0) || !std::isfinite(zeta2)) {
    throw ConfigError("zeta2 must be finite and >= 0");
  }
  Eigen::VectorXd a(n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    const double index = static_cast<double>(i + 1);
    a(i) = index / root_n;
    if (zeta2 == 0.0) continue;
    const double stddev = std::sqrt(zeta2) / index;
    RandomStream stream(seed, static_cast<std::uint64_t>(i), 0, Purpose::kProblem);
    for (int k = 0; k < d; ++k) b(k, i) = stddev * stream.normal();
  }
  return QuadraticProblem(std::move(a), std::move(b), sigma2, {zeta2, seed});
}

namespace {
constexpr const char* kMagic = "mtrack-quadratic";
constexpr int kFormatVersion = 1;
}  // namespace

void save_problem(const QuadraticProblem& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write problem file " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "d " << problem.dim() << " n " << problem.nodes() << " sigma2 "
      << problem.sigma2() << " zeta2 " << problem.metadata().zeta2 << " seed "
      << problem.metadata().seed << '\n';
  for (int i = 0; i < problem.nodes(); ++i) {
    out << problem.a()(i);
    for (int k = 0; k < problem.dim(); ++k) out << ' ' << problem.b()(k, i);
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing problem file " + path.string());
}

QuadraticProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read problem file " + path.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic || version != kFormatVersion) {
    throw ConfigError("not a version-1 problem file: " + path.string());
  }
  auto expect = [&](const char* key) {
    std::string token;
    in >> token;
    if (token != key) {
      throw ConfigError(std::string("problem file: expected field \"") + key + "\"");
    }
  };
  int d = 0, n = 0;
  double sigma2 = 0.0, zeta2 = 0.0;
  std::uint64_t seed = 0;
  expect("d");
  in >> d;
  expect("n");
  in >> n;
  expect("sigma2");
  in >> sigma2;
  expect("zeta2");
  in >> zeta2;
  expect("seed");
  in >> seed;
  if (!in || d < 1 || n < 1) throw ConfigError("problem file: malformed header");
  Eigen::VectorXd a(n);
  Eigen::MatrixXd b(d, n);
  for (int i = 0; i < n; ++i) {
    in >> a(i);
    for (int k = 0; k < d; ++k) in >> b(k, i);
  }
  if (!in) throw ConfigError("problem file: truncated body");
  return QuadraticProblem(std::move(a), std::move(b), sigma2, {zeta2, seed});
}

}  // namespace mtrack
