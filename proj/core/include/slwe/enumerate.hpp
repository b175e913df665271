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

#ifndef SLWE_ENUMERATE_HPP_
#define SLWE_ENUMERATE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace slwe {

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);
/// sum_{k <= w} C(n, k), saturating.
std::uint64_t binomial_sum(std::size_t n, std::size_t w);
/// C(n, k) in floating point, for cost estimates beyond 64 bits.
long double binomial_ld(std::size_t n, std::size_t k);

/// The k-subset of {0..n-1} with colexicographic rank `rank` (ascending positions).
std::vector<std::size_t> colex_unrank(std::size_t n, std::size_t k, std::uint64_t rank);
std::uint64_t colex_rank(const std::vector<std::size_t>& positions);
/// Advances `positions` to its colex successor; false after the last subset.
bool colex_next(std::vector<std::size_t>& positions, std::size_t n);

/// All 0/1 patterns of length n_u with weight <= max_weight, by ascending
/// weight and colex order inside a weight class.
class CruelEnumerator {
 public:
  CruelEnumerator(std::size_t n_u, std::size_t max_weight);

  /// Writes the next pattern; false when exhausted.
  bool next(std::vector<std::uint8_t>& bits);
  std::uint64_t total() const { return binomial_sum(n_u_, max_weight_); }

 private:
  std::size_t n_u_;
  std::size_t max_weight_;
  std::size_t weight_ = 0;
  std::vector<std::size_t> positions_;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace slwe

#endif  // SLWE_ENUMERATE_HPP_
