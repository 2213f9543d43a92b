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

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include "mtrack/problem.hpp"
#include "mtrack/random.hpp"
#include "mtrack/topology.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace mtrack::oracle {

/// Largest |eigenvalue| of the symmetric matrix M by power iteration on M^2
/// with a Rayleigh quotient. Returns lambda (not squared).
inline double power_iteration_abs_eig(const Eigen::MatrixXd& m, int iterations = 20000) {
  Eigen::VectorXd v(m.rows());
  RandomStream stream(12345, 0, 0, Purpose::kTest);
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = stream.normal();
  const Eigen::MatrixXd m2 = m * m;
  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = m2 * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    v = next / norm;
    rayleigh = v.dot(m2 * v);
  }
  return std::sqrt(std::max(0.0, rayleigh));
}

/// p = 1 - lambda^2 via power iteration on the deflated matrix.
inline double spectral_gap_power(const Eigen::MatrixXd& w) {
  const auto n = w.rows();
  const Eigen::MatrixXd deflated = w - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const double lambda = power_iteration_abs_eig(deflated);
  return 1.0 - lambda * lambda;
}

/// Kahan-compensated column mean.
inline Eigen::VectorXd compensated_mean(const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double sum = 0.0, comp = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double y = x(r, c) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    out(r) = sum / static_cast<double>(x.cols());
  }
  return out;
}

/// Central finite-difference gradient.
inline Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd plus = x, minus = x;
    plus(k) += step;
    minus(k) -= step;
    g(k) = (f(plus) - f(minus)) / (2.0 * step);
  }
  return g;
}

/// Minimizer of (1/n) sum_i 0.5 ||A_i x - b_i||^2 with A_i = a_i I, from the
/// full d x d normal equations solved by a dense LU.
inline Eigen::VectorXd normal_equations_minimizer(const Eigen::VectorXd& a,
                                                  const Eigen::MatrixXd& b) {
  const auto d = b.rows();
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Eigen::MatrixXd ai = a(i) * Eigen::MatrixXd::Identity(d, d);
    hessian += ai.transpose() * ai;
    rhs += ai.transpose() * b.col(i);
  }
  return hessian.fullPivLu().solve(rhs);
}

/// Gradient Tracking written directly from the per-node update rules with no
/// momentum, using plain loops. Gradients are supplied by the caller so a
/// shared stream can drive both this and the library.
struct GradientTrackingReference {
  Eigen::MatrixXd w;
  double eta;

  struct State {
    Eigen::MatrixXd x, y, c;  // y plays the role of the tracked gradient
  };

  State step(const State& s, const Eigen::MatrixXd& grads) const {
    const auto n = w.rows();
    const auto d = s.x.rows();
    State next{Eigen::MatrixXd(d, n), grads, Eigen::MatrixXd(d, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) {
        double mixed_x = 0.0;
        double mixed_payload = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (w(i, j) == 0.0) continue;
          mixed_x += w(i, j) * s.x(k, j);
          mixed_payload += w(i, j) * (s.c(k, j) - grads(k, j));
        }
        next.x(k, i) = mixed_x - eta * (grads(k, i) - s.c(k, i));
        next.c(k, i) = mixed_payload + grads(k, i);
      }
    }
    return next;
  }
};

}  // namespace mtrack::oracle
