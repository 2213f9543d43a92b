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
#include "mtrack/problem.hpp"
#include "mtrack/topology.hpp"

#include <benchmark/benchmark.h>

#include <string>

namespace {

using namespace mtrack;

void BM_Mix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MixingMatrix w = build_mixing_matrix(build_topology(TopologyKind::kRing, n));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(50, n);
  Eigen::MatrixXd out(50, n);
  for (auto _ : state) {
    w.mix(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Mix)->Arg(8)->Arg(25)->Arg(64);

void BM_Step(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  const int n = 25;
  const int d = 50;
  const MixingMatrix w = build_mixing_matrix(build_topology(TopologyKind::kRing, n),
                                             WeightScheme::kUniformNeighbor);
  const QuadraticProblem p = synth_quadratic(d, n, 25.0, 1.0, 7);
  const AlgorithmSpec spec{variant, 1e-4, 0.9, InitMode::kTheorem};
  const RandomSource source(1);
  SwarmState s = init_swarm(p, spec, Eigen::VectorXd::Zero(d), source);
  for (auto _ : state) {
    s = step(s, w, p, spec, source);
    benchmark::DoNotOptimize(s.x.data());
  }
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_Step)
    ->Arg(static_cast<int>(Variant::kDsgd))
    ->Arg(static_cast<int>(Variant::kDsgdm))
    ->Arg(static_cast<int>(Variant::kMomentumTracking));

void BM_SpectralGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MixingMatrix w = build_mixing_matrix(build_topology(TopologyKind::kExponential, n));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(w));
}
BENCHMARK(BM_SpectralGap)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
