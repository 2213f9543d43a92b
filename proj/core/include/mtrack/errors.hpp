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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mtrack {

/// Invalid parameters: bad node counts, out-of-range beta, unknown names.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mixing matrix or graph that cannot be used (disconnected, no gap).
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step produced a non-finite value. node is -1 for swarm-level quantities.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t round, int node, std::string field)
      : std::runtime_error("diverged at round " + std::to_string(round) + " (" +
                           (node >= 0 ? "node " + std::to_string(node) + ", " : "") +
                           "field " + field + ")"),
        round_(round),
        node_(node),
        field_(std::move(field)) {}

  std::int64_t round() const noexcept { return round_; }
  int node() const noexcept { return node_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::int64_t round_;
  int node_;
  std::string field_;
};

}  // namespace mtrack
