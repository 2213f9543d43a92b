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


#include "mtrack/algorithms.hpp"

#include "mtrack/errors.hpp"

#include <cmath>
#include <string>

namespace mtrack {

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kDsgd: return "dsgd";
    case Variant::kDsgdm: return "dsgdm";
    case Variant::kGradientTracking: return "gradient_tracking";
    case Variant::kMomentumTracking: return "momentum_tracking";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::kDsgd, Variant::kDsgdm, Variant::kGradientTracking,
                 Variant::kMomentumTracking}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown variant \"" + std::string(name) +
                    "\" (expected dsgd, dsgdm, gradient_tracking or momentum_tracking)");
}

std::string_view to_string(InitMode mode) {
  return mode == InitMode::kTheorem ? "theorem" : "zero";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "theorem") return InitMode::kTheorem;
  if (name == "zero") return InitMode::kZero;
  throw ConfigError("unknown init mode \"" + std::string(name) +
                    "\" (expected theorem or zero)");
}

void AlgorithmSpec::validate(bool allow_zero_eta) const {
  if (!std::isfinite(eta) || eta < 0.0 || (eta == 0.0 && !allow_zero_eta)) {
    throw ConfigError("eta must be > 0");
  }
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
}

double AlgorithmSpec::effective_beta() const noexcept {
  switch (variant) {
    case Variant::kDsgd:
    case Variant::kGradientTracking:
      return 0.0;
    default:
      return beta;
  }
}

namespace {

void check_finite(const Eigen::MatrixXd& m, std::int64_t round, const char* field) {
  if (m.allFinite()) return;
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    if (!m.col(i).allFinite()) throw DivergenceError(round, static_cast<int>(i), field);
  }
}

}  // namespace

Eigen::MatrixXd sample_gradients(const ObjectiveSuite& problem, const Eigen::MatrixXd& x,
                                 std::int64_t round, const RandomSource& source) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    RandomStream stream = source.stream(static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(round),
                                        Purpose::kGradient);
    g.col(i) = problem.stochastic_gradient(static_cast<int>(i), x.col(i), stream);
  }
  return g;
}

SwarmState init_swarm(const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                      const Eigen::VectorXd& x0, const RandomSource& source) {
  const int n = problem.nodes();
  const int d = problem.dim();
  if (x0.size() != d) throw ConfigError("x0 has the wrong dimension");
  if (!x0.allFinite()) throw ConfigError("x0 must be finite");

  SwarmState state;
  state.x = x0.replicate(1, n);
  state.u = Eigen::MatrixXd::Zero(d, n);
  state.c = Eigen::MatrixXd::Zero(d, n);
  state.round = 0;

  if (spec.uses_tracking() && spec.init == InitMode::kTheorem) {
    Eigen::MatrixXd g(d, n);
    for (int i = 0; i < n; ++i) {
      RandomStream stream = source.stream(static_cast<std::uint64_t>(i), 0, Purpose::kInit);
      g.col(i) = problem.stochastic_gradient(i, x0, stream);
    }
    const Eigen::VectorXd mean = g.rowwise().mean();
    const double scale = 1.0 / (1.0 - spec.effective_beta());
    state.u = scale * (g.colwise() - mean);
    state.c = state.u;
  }
  return state;
}

SwarmState step_dsgd(const SwarmState& state, const MixingMatrix& w,
                     const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                     const RandomSource& source, Eigen::MatrixXd* gradients) {
  Eigen::MatrixXd g = sample_gradients(problem, state.x, state.round, source);
  SwarmState next;
  next.round = state.round + 1;
  const Eigen::MatrixXd local = state.x - spec.eta * g;
  w.mix(local, next.x);
  next.u = state.u;
  next.c = state.c;
  check_finite(next.x, next.round, "x");
  if (gradients != nullptr) *gradients = std::move(g);
  return next;
}

SwarmState step_dsgdm(const SwarmState& state, const MixingMatrix& w,
                      const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                      const RandomSource& source, Eigen::MatrixXd* gradients) {
  Eigen::MatrixXd g = sample_gradients(problem, state.x, state.round, source);
  SwarmState next;
  next.round = state.round + 1;
  next.u = spec.beta * state.u + g;
  const Eigen::MatrixXd local = state.x - spec.eta * next.u;
  w.mix(local, next.x);
  next.c = state.c;
  check_finite(next.u, next.round, "u");
  check_finite(next.x, next.round, "x");
  if (gradients != nullptr) *gradients = std::move(g);
  return next;
}

SwarmState step_momentum_tracking(const SwarmState& state, const MixingMatrix& w,
                                  const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                                  const RandomSource& source, Eigen::MatrixXd* gradients) {
  Eigen::MatrixXd g = sample_gradients(problem, state.x, state.round, source);
  const double beta = spec.effective_beta();

  SwarmState next;
  next.round = state.round + 1;
  next.u = beta * state.u + g;

  w.mix(state.x, next.x);
  next.x -= spec.eta * (next.u - state.c);

  const Eigen::MatrixXd payload = state.c - next.u;
  w.mix(payload, next.c);
  next.c += next.u;

  check_finite(next.u, next.round, "u");
  check_finite(next.x, next.round, "x");
  check_finite(next.c, next.round, "c");
  if (gradients != nullptr) *gradients = std::move(g);
  return next;
}

SwarmState step(const SwarmState& state, const MixingMatrix& w,
                const ObjectiveSuite& problem, const AlgorithmSpec& spec,
                const RandomSource& source, Eigen::MatrixXd* gradients) {
  switch (spec.variant) {
    case Variant::kDsgd:
      return step_dsgd(state, w, problem, spec, source, gradients);
    case Variant::kDsgdm:
      return step_dsgdm(state, w, problem, spec, source, gradients);
    case Variant::kGradientTracking:
    case Variant::kMomentumTracking:
      return step_momentum_tracking(state, w, problem, spec, source, gradients);
  }
  throw ConfigError("unhandled variant");
}

Eigen::VectorXd average_iterate(const SwarmState& state) {
  return state.x.rowwise().mean();
}

std::int64_t vectors_per_round(Variant variant, const Graph& g) {
  const auto links = 2 * static_cast<std::int64_t>(g.edge_count());
  switch (variant) {
    case Variant::kDsgd:
    case Variant::kDsgdm:
      return links;
    case Variant::kGradientTracking:
    case Variant::kMomentumTracking:
      return 2 * links;
  }
  return 0;
}

}  // namespace mtrack
