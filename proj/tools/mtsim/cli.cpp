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


#include "cli.hpp"

#include "csv.hpp"
#include "mtrack/errors.hpp"
#include "mtrack/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace mtrack::cli {

using nlohmann::json;
namespace fs = std::filesystem;

RunConfig apply_overrides(RunConfig config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.cadence) config.cadence = *overrides.cadence;
  config.validate();
  return config;
}

namespace {

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json metrics_json(const RoundMetrics& m) {
  return {{"round", m.round},
          {"f_xbar", m.f_xbar},
          {"grad_norm_sq", m.grad_norm_sq},
          {"consensus_xi", m.consensus_xi},
          {"c_sum_norm", m.c_sum_norm},
          {"u_bar_norm", m.u_bar_norm},
          {"vectors_tx", m.vectors_tx}};
}

json summary_json(const RunResult& result) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = json::parse(config_to_json(result.config));
  doc["status"] = result.status.to_string();
  if (!result.status.completed) doc["divergence"] = result.status.message;
  doc["final"] = result.metrics.empty() ? json(nullptr) : metrics_json(result.metrics.back());
  doc["final_xbar_norm"] = result.final_xbar.norm();
  doc["distance_to_minimizer"] =
      result.distance_to_minimizer ? json(*result.distance_to_minimizer) : json(nullptr);
  if (!result.metrics.empty()) {
    doc["tail_mean_grad_norm_sq"] = tail_mean_grad_norm_sq(result);
  }
  return doc;
}

// Seeds for repeat k of a plain run; repeat 0 is the config itself.
RunConfig repeat_config(const RunConfig& base, int repeat) {
  RunConfig config = base;
  if (repeat > 0) {
    config.seed = hash_combine(base.seed, static_cast<std::uint64_t>(repeat));
    config.problem.seed = hash_combine(base.problem.seed, static_cast<std::uint64_t>(repeat));
  }
  return config;
}

std::vector<RoundMetrics> mean_series(const std::vector<RunResult>& runs) {
  std::size_t len = runs.front().metrics.size();
  for (const auto& r : runs) len = std::min(len, r.metrics.size());
  std::vector<RoundMetrics> mean(len);
  const double k = static_cast<double>(runs.size());
  for (std::size_t t = 0; t < len; ++t) {
    RoundMetrics& m = mean[t];
    m.round = runs.front().metrics[t].round;
    m.vectors_tx = runs.front().metrics[t].vectors_tx;
    for (const auto& r : runs) {
      const RoundMetrics& s = r.metrics[t];
      m.f_xbar += s.f_xbar / k;
      m.grad_norm_sq += s.grad_norm_sq / k;
      m.consensus_xi += s.consensus_xi / k;
      m.c_sum_norm += s.c_sum_norm / k;
      m.u_bar_norm += s.u_bar_norm / k;
    }
  }
  return mean;
}

}  // namespace

void write_run_outputs(const fs::path& dir, const RunResult& result) {
  fs::create_directories(dir);
  write_metrics_csv(dir / "metrics.csv", result.metrics);
  write_json(dir / "summary.json", summary_json(result));
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides,
            int repeats, std::ostream& log) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  const RunConfig base = apply_overrides(load_config(config_path), overrides);

  std::vector<RunResult> runs;
  bool diverged = false;
  for (int k = 0; k < repeats; ++k) {
    runs.push_back(run(repeat_config(base, k)));
    const RunResult& r = runs.back();
    diverged = diverged || !r.status.completed;
    const fs::path dir = repeats == 1 ? out_dir : out_dir / ("repeat_" + std::to_string(k));
    write_run_outputs(dir, r);
    log << "run " << k << ": " << r.status.to_string() << ", final grad_norm_sq "
        << format_real(r.metrics.back().grad_norm_sq) << " -> " << dir.string() << '\n';
  }

  if (repeats > 1) {
    write_metrics_csv(out_dir / "metrics_mean.csv", mean_series(runs));
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["config"] = json::parse(config_to_json(base));
    doc["repeats"] = repeats;
    json per = json::array();
    double tail = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      per.push_back(summary_json(runs[k]));
      tail += tail_mean_grad_norm_sq(runs[k]) / static_cast<double>(runs.size());
    }
    doc["runs"] = per;
    doc["mean_tail_grad_norm_sq"] = tail;
    doc["status"] = diverged ? "diverged" : "completed";
    write_json(out_dir / "summary.json", doc);
  }
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep(const fs::path& config_path, const std::string& axis_name,
              const std::vector<std::string>& values, const fs::path& out_dir,
              const Overrides& overrides, int repeats, unsigned workers, std::ostream& log) {
  const SweepAxis axis = parse_sweep_axis(axis_name);
  const RunConfig base = apply_overrides(load_config(config_path), overrides);
  const std::vector<SweepPoint> points = sweep(base, axis, values, repeats, workers);

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["axis"] = axis_name;
  report["values"] = values;
  report["repeats"] = repeats;
  report["base_config"] = json::parse(config_to_json(base));
  json runs = json::array();
  bool diverged = false;
  for (const auto& pt : points) {
    const fs::path dir =
        out_dir / (axis_name + "=" + pt.value) / ("seed_" + std::to_string(pt.repeat));
    write_run_outputs(dir, pt.result);
    diverged = diverged || !pt.result.status.completed;
    runs.push_back({{"value", pt.value},
                    {"repeat", pt.repeat},
                    {"seed", pt.result.config.seed},
                    {"problem_seed", pt.result.config.problem.seed},
                    {"status", pt.result.status.to_string()},
                    {"tail_mean_grad_norm_sq", tail_mean_grad_norm_sq(pt.result)},
                    {"dir", fs::relative(dir, out_dir).string()}});
  }
  report["runs"] = runs;

  if (axis == SweepAxis::kZeta2) {
    std::map<double, std::vector<RunResult>> by_level;
    for (const auto& pt : points) by_level[pt.result.config.problem.zeta2].push_back(pt.result);
    try {
      const IndependenceVerdict v = heterogeneity_independence_test(by_level);
      json means = json::object();
      for (const auto& [z, m] : v.level_means) means[format_real(z)] = m;
      report["verdict"] = {{"test", "heterogeneity_independence"},
                           {"variant", to_string(base.algorithm.variant)},
                           {"result", v.pass ? "PASS" : "FAIL"},
                           {"ratio", v.ratio},
                           {"threshold", v.threshold},
                           {"window_fraction", v.window_fraction},
                           {"level_means", means},
                           {"monotone_increasing", v.monotone_increasing},
                           {"extreme_ratio", v.extreme_ratio},
                           {"note", "threshold calibrated for the d=50, n=25 ring benchmark"}};
      log << "heterogeneity independence: " << (v.pass ? "PASS" : "FAIL") << " (ratio "
          << format_real(v.ratio) << ", monotone increase "
          << (v.monotone_increasing ? "yes" : "no") << ")\n";
    } catch (const ConfigError& e) {
      report["verdict"] = {{"test", "heterogeneity_independence"},
                           {"result", "SKIPPED"},
                           {"reason", e.what()}};
    }
  }

  fs::create_directories(out_dir);
  write_json(out_dir / "sweep_report.json", report);
  log << points.size() << " runs written under " << out_dir.string() << '\n';
  return diverged ? kExitDiverged : kExitOk;
}

// ---------------------------------------------------------------------------
// verify

namespace {

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::numeric_limits<double>::infinity(), e.what()};
  }
}

}  // namespace

std::vector<CheckResult> verify_invariants(const RunConfig& input, const VerifyOptions& options) {
  RunConfig config = input;
  config.rounds = options.rounds;
  config.validate();
  RunSetup setup = make_setup(config);
  if (options.tamper) {
    Eigen::MatrixXd w = setup.mixing.dense();
    options.tamper(w);
    setup.mixing = MixingMatrix::unchecked(std::move(w));
  }
  const QuadraticProblem& problem = *setup.problem;
  const RandomSource source(config.seed);

  std::vector<CheckResult> checks;

  // Structural checks on W.
  const auto violations = check_mixing(setup.mixing, &setup.graph);
  for (const char* name : {"symmetry", "double_stochasticity", "nonnegativity", "sparsity"}) {
    CheckResult c{std::string("mixing.") + name, true, 0.0, {}};
    for (const auto& v : violations) {
      if (v.check == name) {
        c.pass = false;
        c.residual = v.residual;
      }
    }
    checks.push_back(c);
  }

  checks.push_back(guarded("mixing.contraction", [&] {
    const double p = spectral_gap(setup.mixing);
    const int n = setup.mixing.size();
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < options.contraction_samples; ++s) {
      RandomStream stream(config.seed, static_cast<std::uint64_t>(s), 0, Purpose::kTest);
      Eigen::MatrixXd x(problem.dim(), n);
      for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = stream.normal();
      const Eigen::MatrixXd centered = x.colwise() - x.rowwise().mean();
      const Eigen::MatrixXd mixed = setup.mixing.mix(x);
      const Eigen::MatrixXd mixed_centered = mixed.colwise() - x.rowwise().mean();
      const double before = centered.squaredNorm();
      worst = std::max(worst, mixed_centered.squaredNorm() / before - (1.0 - p));
    }
    return CheckResult{"mixing.contraction", worst <= 1e-9, std::max(worst, 0.0),
                       "p = " + std::to_string(p)};
  }));

  checks.push_back(guarded("gossip_contraction", [&] {
    const double p = spectral_gap(setup.mixing);
    AlgorithmSpec gossip{Variant::kDsgd, 0.0, 0.0, InitMode::kZero};
    SwarmState state = init_swarm(problem, gossip, setup.x0, source);
    RandomStream stream(config.seed, 0, 1, Purpose::kTest);
    for (Eigen::Index k = 0; k < state.x.size(); ++k) state.x.data()[k] = stream.normal();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::int64_t r = 0; r < config.rounds; ++r) {
      const double before = consensus_distance(state);
      state = step(state, setup.mixing, problem, gossip, source);
      worst = std::max(worst, consensus_distance(state) - (1.0 - p) * before);
    }
    return CheckResult{"gossip_contraction", worst <= 1e-9, std::max(worst, 0.0), {}};
  }));

  AlgorithmSpec tracking = config.algorithm;
  if (!tracking.uses_tracking()) tracking.variant = Variant::kMomentumTracking;

  checks.push_back(guarded("c_sum_zero", [&] {
    SwarmState state = init_swarm(problem, tracking, setup.x0, source);
    auto residual = [](const SwarmState& s) {
      const double scale = std::max(1.0, s.c.colwise().norm().maxCoeff());
      return s.c.rowwise().sum().norm() / scale;
    };
    double worst = residual(state);
    for (std::int64_t r = 0; r < config.rounds; ++r) {
      state = step(state, setup.mixing, problem, tracking, source);
      worst = std::max(worst, residual(state));
    }
    return CheckResult{"c_sum_zero", worst <= 1e-9, worst,
                       "variant " + std::string(to_string(tracking.variant))};
  }));

  checks.push_back(guarded("xbar_recursion", [&] {
    const RunResult r = run(config, setup, {.keep_xbar = true, .keep_gradients = true});
    if (!r.status.completed) throw DivergenceError(r.status.diverged_round, -1, "x");
    const auto replay = reference_sgdm_xbar(r.gradient_history, config.algorithm.eta,
                                            config.algorithm.effective_beta(), setup.x0);
    const double worst = max_relative_deviation(r.xbar_history, replay);
    return CheckResult{"xbar_recursion", worst <= 1e-9, worst,
                       "variant " + std::string(to_string(config.algorithm.variant))};
  }));

  checks.push_back(guarded("beta0_equivalence", [&] {
    AlgorithmSpec mt = tracking;
    mt.variant = Variant::kMomentumTracking;
    mt.beta = 0.0;
    AlgorithmSpec gt = mt;
    gt.variant = Variant::kGradientTracking;
    gt.beta = config.algorithm.beta;  // ignored by the alias
    SwarmState a = init_swarm(problem, mt, setup.x0, source);
    SwarmState b = init_swarm(problem, gt, setup.x0, source);
    double worst = 0.0;
    for (std::int64_t r = 0; r < config.rounds; ++r) {
      a = step(a, setup.mixing, problem, mt, source);
      b = step(b, setup.mixing, problem, gt, source);
      worst = std::max({worst, (a.x - b.x).cwiseAbs().maxCoeff(),
                        (a.u - b.u).cwiseAbs().maxCoeff(), (a.c - b.c).cwiseAbs().maxCoeff()});
    }
    return CheckResult{"beta0_equivalence", worst == 0.0, worst, {}};
  }));

  return checks;
}

int cmd_verify(const fs::path& config_path, const Overrides& overrides,
               const VerifyOptions& options, std::ostream& log) {
  const RunConfig config = apply_overrides(load_config(config_path), overrides);
  const auto checks = verify_invariants(config, options);
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass;
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " residual=" << format_real(c.residual);
    if (!c.detail.empty()) log << " (" << c.detail << ")";
    log << '\n';
  }
  return ok ? kExitOk : kExitInvariant;
}

// ---------------------------------------------------------------------------
// bound

RateBoundInputs bound_inputs_from_config(const RunConfig& config) {
  const RunSetup setup = make_setup(config);
  const QuadraticProblem& problem = *setup.problem;
  RateBoundInputs in;
  const double f_star = problem.value(problem.global_minimizer());
  in.r0 = std::max(0.0, problem.value(setup.x0) - f_star);
  in.sigma2 = problem.sigma2();
  in.L = problem.smoothness();
  in.p = spectral_gap(setup.mixing);
  in.beta = config.algorithm.effective_beta();
  in.n = problem.nodes();
  in.R = static_cast<double>(config.rounds);
  return in;
}

std::string bound_report_json(const RateBoundInputs& in) {
  const RateBound b = mt_rate_bound(in);
  json doc = {{"schema_version", kReportSchemaVersion},
              {"label", "diagnostic, constants = 1"},
              {"inputs",
               {{"r0", in.r0},
                {"sigma2", in.sigma2},
                {"L", in.L},
                {"p", in.p},
                {"beta", in.beta},
                {"n", in.n},
                {"R", in.R}}},
              {"term1", b.term1},
              {"term2", b.term2},
              {"term3", b.term3},
              {"total", b.total}};
  if (in.L > 0.0) doc["admissible_eta"] = admissible_step_size(in.L, in.p, in.beta);
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// entry point

namespace {

fs::path default_out(const std::string& subcommand) {
  const char* root = std::getenv(kOutRootEnv);
  return fs::path(root != nullptr && *root != '\0' ? root : "mtsim-out") / subcommand;
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mtsim: decentralized momentum-tracking simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::int64_t cadence = 1;
  int repeats = 1;
  std::string axis;
  std::string values;
  unsigned workers = 0;
  std::int64_t verify_rounds = 200;
  RateBoundInputs bound;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "Override the run seed");
    sub->add_option("--cadence", cadence, "Record metrics every k rounds");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Execute one configuration");
  add_common(run_cmd);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--repeats", repeats, "Independent repeats (seeds derived)")
      ->check(CLI::PositiveNumber);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_option("--repeats", repeats, "Seeds per value")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--axis", axis, "zeta2|beta|eta|topology|variant|sigma2|n")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--workers", workers, "Concurrent runs (0 = all cores)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the invariant battery");
  add_common(verify_cmd);
  verify_cmd->add_option("--rounds", verify_rounds, "Rounds per check")
      ->check(CLI::PositiveNumber);

  CLI::App* bound_cmd = app.add_subcommand("bound", "Evaluate the rate bound terms");
  bound_cmd->add_option("--config", config_path, "Derive L, p, r0 from a configuration");
  bound_cmd->add_option("--r0", bound.r0, "Initial suboptimality");
  bound_cmd->add_option("--sigma2", bound.sigma2, "Gradient noise variance");
  bound_cmd->add_option("--L", bound.L, "Smoothness constant");
  bound_cmd->add_option("--p", bound.p, "Spectral gap");
  bound_cmd->add_option("--beta", bound.beta, "Momentum coefficient");
  bound_cmd->add_option("--n", bound.n, "Node count");
  bound_cmd->add_option("--R", bound.R, "Rounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Overrides overrides;
  for (CLI::App* sub : {run_cmd, sweep_cmd, verify_cmd}) {
    if (sub->count("--seed") > 0) overrides.seed = seed;
    if (sub->count("--cadence") > 0) overrides.cadence = cadence;
  }

  try {
    if (*run_cmd) {
      return cmd_run(config_path, out_dir.empty() ? default_out("run") : fs::path(out_dir),
                     overrides, repeats, out);
    }
    if (*sweep_cmd) {
      return cmd_sweep(config_path, axis, split_values(values),
                       out_dir.empty() ? default_out("sweep") : fs::path(out_dir), overrides,
                       repeats, workers, out);
    }
    if (*verify_cmd) {
      VerifyOptions options;
      options.rounds = verify_rounds;
      return cmd_verify(config_path, overrides, options, out);
    }
    if (*bound_cmd) {
      RateBoundInputs inputs = bound;
      if (!config_path.empty()) {
        RunConfig config = load_config(config_path);
        inputs = bound_inputs_from_config(config);
      }
      out << bound_report_json(inputs) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TopologyError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace mtrack::cli
