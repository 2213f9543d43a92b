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


#include "mtrack/topology.hpp"

#include "mtrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mtrack {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kHypercube: return "hypercube";
    case TopologyKind::kExponential: return "exponential";
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kPath: return "path";
  }
  return "unknown";
}

std::string_view to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kMetropolis: return "metropolis";
    case WeightScheme::kUniformNeighbor: return "uniform";
  }
  return "unknown";
}

TopologyKind parse_topology_kind(std::string_view name) {
  for (auto kind : {TopologyKind::kRing, TopologyKind::kHypercube,
                    TopologyKind::kExponential, TopologyKind::kComplete,
                    TopologyKind::kPath}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown topology \"" + std::string(name) +
                    "\" (expected ring, hypercube, exponential, complete or path)");
}

WeightScheme parse_weight_scheme(std::string_view name) {
  if (name == "metropolis") return WeightScheme::kMetropolis;
  if (name == "uniform") return WeightScheme::kUniformNeighbor;
  throw ConfigError("unknown weight scheme \"" + std::string(name) +
                    "\" (expected metropolis or uniform)");
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), adjacency_(n > 0 ? n : 0) {
  if (n < 1) throw ConfigError("graph needs at least one node");
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw ConfigError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") has an endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (i == j) throw ConfigError("self-loop at node " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw ConfigError("duplicate edge in graph");
  }
  edges_ = std::move(edges);
  for (const auto& [i, j] : edges_) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

bool Graph::is_regular() const {
  for (int i = 1; i < n_; ++i) {
    if (degree(i) != degree(0)) return false;
  }
  return true;
}

bool Graph::is_connected() const {
  std::vector<bool> seen(n_, false);
  std::vector<int> frontier{0};
  seen[0] = true;
  int visited = 1;
  while (!frontier.empty()) {
    const int node = frontier.back();
    frontier.pop_back();
    for (int next : adjacency_[node]) {
      if (!seen[next]) {
        seen[next] = true;
        ++visited;
        frontier.push_back(next);
      }
    }
  }
  return visited == n_;
}

Graph build_topology(TopologyKind kind, int n) {
  if (n < 1) throw ConfigError("node count must be >= 1");
  std::set<Graph::Edge> edges;
  auto link = [&](int i, int j) {
    if (i != j) edges.insert({std::min(i, j), std::max(i, j)});
  };

  switch (kind) {
    case TopologyKind::kRing:
      if (n < 3) throw ConfigError("ring requires n >= 3");
      for (int i = 0; i < n; ++i) link(i, (i + 1) % n);
      break;
    case TopologyKind::kHypercube: {
      if ((n & (n - 1)) != 0) throw ConfigError("hypercube requires n to be a power of two");
      for (int i = 0; i < n; ++i) {
        for (int bit = 1; bit < n; bit <<= 1) link(i, i ^ bit);
      }
      break;
    }
    case TopologyKind::kExponential:
      for (int i = 0; i < n; ++i) {
        for (long hop = 1; hop < n; hop <<= 1) {
          link(i, static_cast<int>((i + hop) % n));
          link(i, static_cast<int>(((i - hop) % n + n) % n));
        }
      }
      break;
    case TopologyKind::kComplete:
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) link(i, j);
      }
      break;
    case TopologyKind::kPath:
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
  }
  return Graph(n, {edges.begin(), edges.end()});
}

// ---------------------------------------------------------------------------
// MixingMatrix

MixingMatrix MixingMatrix::unchecked(Eigen::MatrixXd weights) {
  if (weights.rows() != weights.cols() || weights.rows() < 1) {
    throw ConfigError("mixing matrix must be square and non-empty");
  }
  return MixingMatrix(std::move(weights));
}

void MixingMatrix::mix(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const {
  const Eigen::Index n = w_.rows();
  out.setZero(x.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wij = w_(i, j);
      if (wij != 0.0) out.col(i) += wij * x.col(j);
    }
  }
}

Eigen::MatrixXd MixingMatrix::mix(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out;
  mix(x, out);
  return out;
}

namespace {

Eigen::MatrixXd metropolis_weights(const Graph& g) {
  const int n = g.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    const double wij = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.neighbors(i)) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return w;
}

}  // namespace

MixingMatrix build_mixing_matrix(const Graph& g, WeightScheme scheme) {
  if (!g.is_connected()) {
    throw TopologyError("graph is disconnected; mixing has no spectral gap");
  }
  if (scheme == WeightScheme::kUniformNeighbor) {
    if (!g.is_regular()) return MixingMatrix(metropolis_weights(g), true);
    const int n = g.size();
    const double share = 1.0 / (1.0 + g.degree(0));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      w(i, i) = share;
      for (int j : g.neighbors(i)) w(i, j) = share;
    }
    return MixingMatrix(std::move(w));
  }
  return MixingMatrix(metropolis_weights(g));
}

std::vector<MixingViolation> check_mixing(const MixingMatrix& mm, const Graph* g) {
  const Eigen::MatrixXd& w = mm.dense();
  std::vector<MixingViolation> out;

  const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
  if (asym != 0.0) out.push_back({"symmetry", asym});

  const double row_err = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_err = (w.colwise().sum().array() - 1.0).abs().maxCoeff();
  const double sum_err = std::max(row_err, col_err);
  if (!(sum_err <= 1e-12)) out.push_back({"double_stochasticity", sum_err});

  const double most_negative = w.minCoeff();
  if (most_negative < 0.0 || w.maxCoeff() > 1.0) {
    out.push_back({"nonnegativity", std::max(-most_negative, w.maxCoeff() - 1.0)});
  }

  if (g != nullptr) {
    double stray = 0.0;
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) {
        if (i != j && w(i, j) != 0.0 && !g->has_edge(i, j)) {
          stray = std::max(stray, std::abs(w(i, j)));
        }
      }
    }
    if (stray > 0.0) out.push_back({"sparsity", stray});
  }
  return out;
}

double spectral_gap(const MixingMatrix& mm) {
  const Eigen::Index n = mm.size();
  const Eigen::MatrixXd deflated =
      mm.dense() - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(deflated,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw TopologyError("eigendecomposition of the mixing matrix failed");
  }
  const double lambda = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (lambda >= 1.0 - 1e-10) throw TopologyError("no spectral gap");
  return 1.0 - lambda * lambda;
}

}  // namespace mtrack
