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
#include <optional>

namespace mtrack {

/// What a block of random draws is used for. Part of the stream key so that
/// problem generation, initialization and per-round noise never overlap.
enum class Purpose : std::uint32_t {
  kProblem = 1,
  kInit = 2,
  kGradient = 3,
  kStartPoint = 4,
  kTest = 5,
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Order-sensitive combination of two words.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;

/// Counter-based generator keyed by (seed, node, round, purpose).
///
/// Draw k of a stream is mix64(key + (k + 1) * golden), so the output
/// depends only on the key and the draw index, never on evaluation order
/// across streams. Normals use the Box-Muller transform on pairs of
/// uniforms in (0, 1].
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t node, std::uint64_t round,
               Purpose purpose) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform in (0, 1], 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal.
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

/// Hands out streams for a fixed run seed.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) noexcept : seed_(seed) {}

  RandomStream stream(std::uint64_t node, std::uint64_t round,
                      Purpose purpose) const noexcept {
    return RandomStream(seed_, node, round, purpose);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace mtrack
