// Copyright 2026 The slwe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLWE_RNG_HPP_
#define SLWE_RNG_HPP_

#include <cstdint>
#include <random>

namespace slwe {

/// Deterministic random source built on std::mt19937_64, whose output sequence
/// is fixed by the C++ standard. All derived draws (bounded integers, uniform
/// reals, normals) are implemented here rather than via <random>
/// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream) via a SplitMix64 mix of both words.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound); bound > 0. Unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform residue in (-q/2, q/2].
  std::int64_t centered_residue(std::int64_t q);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal via the polar Box-Muller method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace slwe

#endif  // SLWE_RNG_HPP_
