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


#include "mtrack/engine.hpp"

#include "mtrack/errors.hpp"
#include "mtrack/random.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace mtrack {

void RunConfig::validate() const {
  if (topology.n < 1) throw ConfigError("topology.n must be >= 1");
  if (!problem.file && problem.d < 1) throw ConfigError("problem.d must be >= 1");
  if (!(problem.zeta2 >= 0.0) || !std::isfinite(problem.zeta2)) {
    throw ConfigError("problem.zeta2 must be finite and >= 0");
  }
  if (!(problem.sigma2 >= 0.0) || !std::isfinite(problem.sigma2)) {
    throw ConfigError("problem.sigma2 must be finite and >= 0");
  }
  algorithm.validate(/*allow_zero_eta=*/true);
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (cadence < 1) throw ConfigError("cadence must be >= 1");
  if (x0.mode == StartPoint::Mode::kSphere && !(x0.radius >= 0.0)) {
    throw ConfigError("x0.radius must be >= 0");
  }
  // Hypercube/ring constraints are checked by build_topology.
}

std::string RunStatus::to_string() const {
  return completed ? "completed" : "diverged@" + std::to_string(diverged_round);
}

namespace {

Eigen::VectorXd make_start(const StartPoint& start, int d) {
  switch (start.mode) {
    case StartPoint::Mode::kZeros:
      return Eigen::VectorXd::Zero(d);
    case StartPoint::Mode::kVector: {
      if (static_cast<int>(start.values.size()) != d) {
        throw ConfigError("x0.values must have exactly d = " + std::to_string(d) + " entries");
      }
      return Eigen::Map<const Eigen::VectorXd>(start.values.data(), d);
    }
    case StartPoint::Mode::kSphere: {
      RandomStream stream(start.seed, 0, 0, Purpose::kStartPoint);
      Eigen::VectorXd v(d);
      for (int k = 0; k < d; ++k) v(k) = stream.normal();
      return start.radius * v / v.norm();
    }
  }
  return Eigen::VectorXd::Zero(d);
}

}  // namespace

RunSetup make_setup(const RunConfig& config) {
  config.validate();
  Graph graph = build_topology(config.topology.kind, config.topology.n);
  MixingMatrix mixing = build_mixing_matrix(graph, config.topology.scheme);
  std::shared_ptr<const QuadraticProblem> problem;
  if (config.problem.file) {
    auto loaded = load_problem(*config.problem.file).with_sigma2(config.problem.sigma2);
    if (loaded.nodes() != config.topology.n) {
      throw ConfigError("problem.file has " + std::to_string(loaded.nodes()) +
                        " nodes but topology.n is " + std::to_string(config.topology.n));
    }
    problem = std::make_shared<const QuadraticProblem>(std::move(loaded));
  } else {
    problem = std::make_shared<const QuadraticProblem>(
        synth_quadratic(config.problem.d, config.topology.n, config.problem.zeta2,
                        config.problem.sigma2, config.problem.seed));
  }
  Eigen::VectorXd x0 = make_start(config.x0, problem->dim());
  return RunSetup{std::move(graph), std::move(mixing), std::move(problem), std::move(x0)};
}

double consensus_distance(const SwarmState& state) {
  const Eigen::VectorXd mean = average_iterate(state);
  return (state.x.colwise() - mean).squaredNorm() / state.nodes();
}

RoundMetrics measure_round(const SwarmState& state, const ObjectiveSuite& problem,
                           std::int64_t vectors_tx) {
  const Eigen::VectorXd xbar = average_iterate(state);
  RoundMetrics m;
  m.round = state.round;
  m.f_xbar = problem.value(xbar);
  m.grad_norm_sq = problem.gradient(xbar).squaredNorm();
  m.consensus_xi = consensus_distance(state);
  m.c_sum_norm = state.c.rowwise().sum().norm();
  m.u_bar_norm = state.u.rowwise().mean().norm();
  m.vectors_tx = vectors_tx;
  return m;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  const RunSetup setup = make_setup(config);
  return run(config, setup, options);
}

RunResult run(const RunConfig& config, const RunSetup& setup, const RunOptions& options) {
  config.validate();
  const QuadraticProblem& problem = *setup.problem;
  const RandomSource source(config.seed);
  const std::int64_t per_round = vectors_per_round(config.algorithm.variant, setup.graph);

  RunResult result;
  result.config = config;
  result.metrics.reserve(static_cast<std::size_t>(config.rounds / config.cadence + 2));

  SwarmState state = init_swarm(problem, config.algorithm, setup.x0, source);
  result.metrics.push_back(measure_round(state, problem, 0));
  if (options.keep_xbar) {
    result.xbar_history.push_back(average_iterate(state));
    result.ubar_history.push_back(state.u.rowwise().mean());
  }

  Eigen::MatrixXd gradients;
  Eigen::MatrixXd* gradient_sink = options.keep_gradients ? &gradients : nullptr;
  try {
    while (state.round < config.rounds) {
      state = step(state, setup.mixing, problem, config.algorithm, source, gradient_sink);
      if (options.keep_gradients) result.gradient_history.push_back(gradients);
      if (options.keep_xbar) {
        result.xbar_history.push_back(average_iterate(state));
        result.ubar_history.push_back(state.u.rowwise().mean());
      }
      if (state.round % config.cadence == 0 || state.round == config.rounds) {
        RoundMetrics m = measure_round(state, problem, per_round);
        // Finite iterates can still overflow the squared norms.
        if (!std::isfinite(m.f_xbar) || !std::isfinite(m.grad_norm_sq) ||
            !std::isfinite(m.consensus_xi)) {
          throw DivergenceError(state.round, -1, "metrics");
        }
        result.metrics.push_back(m);
      }
    }
  } catch (const DivergenceError& e) {
    result.status.completed = false;
    result.status.diverged_round = e.round();
    result.status.message = e.what();
  }

  result.final_xbar = average_iterate(state);
  if (auto xstar = problem.minimizer()) {
    result.distance_to_minimizer = (result.final_xbar - *xstar).norm();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sweeps

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kZeta2: return "zeta2";
    case SweepAxis::kBeta: return "beta";
    case SweepAxis::kEta: return "eta";
    case SweepAxis::kTopology: return "topology";
    case SweepAxis::kVariant: return "variant";
    case SweepAxis::kSigma2: return "sigma2";
    case SweepAxis::kN: return "n";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto axis : {SweepAxis::kZeta2, SweepAxis::kBeta, SweepAxis::kEta,
                    SweepAxis::kTopology, SweepAxis::kVariant, SweepAxis::kSigma2,
                    SweepAxis::kN}) {
    if (to_string(axis) == name) return axis;
  }
  throw ConfigError("unknown sweep axis \"" + std::string(name) +
                    "\" (expected zeta2, beta, eta, topology, variant, sigma2 or n)");
}

namespace {

double parse_real(SweepAxis axis, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("sweep value \"" + text + "\" is not a number for axis " +
                      std::string(to_string(axis)));
  }
  return value;
}

}  // namespace

RunConfig apply_axis(const RunConfig& base, SweepAxis axis, const std::string& value) {
  RunConfig config = base;
  switch (axis) {
    case SweepAxis::kZeta2: config.problem.zeta2 = parse_real(axis, value); break;
    case SweepAxis::kBeta: config.algorithm.beta = parse_real(axis, value); break;
    case SweepAxis::kEta: config.algorithm.eta = parse_real(axis, value); break;
    case SweepAxis::kSigma2: config.problem.sigma2 = parse_real(axis, value); break;
    case SweepAxis::kTopology: config.topology.kind = parse_topology_kind(value); break;
    case SweepAxis::kVariant: config.algorithm.variant = parse_variant(value); break;
    case SweepAxis::kN: {
      const double n = parse_real(axis, value);
      if (n != std::floor(n) || n < 1 || n > 1e6) {
        throw ConfigError("sweep value \"" + value + "\" is not a valid node count");
      }
      config.topology.n = static_cast<int>(n);
      break;
    }
  }
  config.validate();
  return config;
}

std::uint64_t derive_seed(std::uint64_t base, SweepAxis axis, const std::string& value,
                          int repeat) {
  std::uint64_t h = hash_combine(mix64(base), static_cast<std::uint64_t>(axis) + 1);
  for (unsigned char ch : value) h = hash_combine(h, ch);
  return hash_combine(h, static_cast<std::uint64_t>(repeat));
}

std::vector<SweepPoint> sweep(const RunConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values, int repeats,
                              unsigned workers) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");

  std::vector<SweepPoint> points;
  std::vector<RunSetup> setups;
  for (const auto& value : values) {
    for (int rep = 0; rep < repeats; ++rep) {
      RunConfig config = apply_axis(base, axis, value);
      config.seed = derive_seed(base.seed, axis, value, rep);
      if (rep > 0) config.problem.seed = hash_combine(base.problem.seed, rep);
      setups.push_back(make_setup(config));
      points.push_back({value, rep, RunResult{config, {}, {}, {}, {}, {}, {}, {}}});
    }
  }
  if (points.empty()) return points;

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(points.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        points[k].result = run(points[k].result.config, setups[k]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return points;
}

}  // namespace mtrack
