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

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtrack {

enum class TopologyKind { kRing, kHypercube, kExponential, kComplete, kPath };
enum class WeightScheme { kMetropolis, kUniformNeighbor };

/// Lowercase config names: "ring", "hypercube", "exponential", "complete",
/// "path" and "metropolis", "uniform".
std::string_view to_string(TopologyKind kind);
std::string_view to_string(WeightScheme scheme);
TopologyKind parse_topology_kind(std::string_view name);
WeightScheme parse_weight_scheme(std::string_view name);

/// Undirected simple graph on nodes 0..n-1.
class Graph {
 public:
  using Edge = std::pair<int, int>;

  /// Validates endpoints, self-loops and duplicates. Does not require
  /// connectivity; see is_connected().
  Graph(int n, std::vector<Edge> edges);

  int size() const noexcept { return n_; }
  /// Edges normalized to (min, max) and sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  int degree(int node) const { return static_cast<int>(adjacency_.at(node).size()); }
  const std::vector<int>& neighbors(int node) const { return adjacency_.at(node); }
  bool has_edge(int i, int j) const;
  bool is_regular() const;
  bool is_connected() const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Ring (n >= 3), Hypercube (n = 2^k), Exponential (i ~ i +- 2^m mod n),
/// Complete, Path. Throws ConfigError naming the violated constraint.
Graph build_topology(TopologyKind kind, int n);

/// Symmetric doubly stochastic weights supported on a graph.
class MixingMatrix {
 public:
  /// Builds from raw weights without checking anything. Use check_mixing()
  /// to validate; this exists so tooling can inspect broken matrices.
  static MixingMatrix unchecked(Eigen::MatrixXd weights);

  int size() const noexcept { return static_cast<int>(w_.rows()); }
  double operator()(int i, int j) const { return w_(i, j); }
  const Eigen::MatrixXd& dense() const noexcept { return w_; }

  /// Set when UniformNeighbor was requested on an irregular graph and
  /// Metropolis weights were used instead.
  bool fell_back_to_metropolis() const noexcept { return fallback_; }

  /// out.col(i) = sum_j W(i, j) * x.col(j), summed in ascending j.
  /// The fixed summation order is part of the reproducibility contract.
  void mix(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const;
  Eigen::MatrixXd mix(const Eigen::MatrixXd& x) const;

 private:
  friend MixingMatrix build_mixing_matrix(const Graph&, WeightScheme);
  explicit MixingMatrix(Eigen::MatrixXd w, bool fallback = false)
      : w_(std::move(w)), fallback_(fallback) {}

  Eigen::MatrixXd w_;
  bool fallback_ = false;
};

/// Throws TopologyError if g is disconnected.
MixingMatrix build_mixing_matrix(const Graph& g,
                                 WeightScheme scheme = WeightScheme::kMetropolis);

/// One failed structural check on a mixing matrix.
struct MixingViolation {
  std::string check;  // "symmetry", "double_stochasticity", "nonnegativity", "sparsity"
  double residual;
};

/// Empty result means every invariant holds. Row/column sums are compared to
/// 1 with absolute tolerance 1e-12; symmetry is exact. Sparsity is only
/// checked when a graph is given.
std::vector<MixingViolation> check_mixing(const MixingMatrix& w,
                                          const Graph* g = nullptr);

/// p = 1 - lambda^2, lambda the largest |eigenvalue| of W - 11^T/N.
/// Throws TopologyError("no spectral gap") when lambda >= 1 - 1e-10.
double spectral_gap(const MixingMatrix& w);

}  // namespace mtrack
