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

#include "slwe/enumerate.hpp"

#include <limits>
#include <numeric>

#include "slwe/modmath.hpp"

namespace slwe {

namespace {
constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > kSat) return kSat;
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t binomial_sum(std::size_t n, std::size_t w) {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k <= std::min(n, w); ++k) {
    const std::uint64_t c = binomial(n, k);
    if (c == kSat || total > kSat - c) return kSat;
    total += c;
  }
  return total;
}

long double binomial_ld(std::size_t n, std::size_t k) {
  if (k > n) return 0.0L;
  k = std::min(k, n - k);
  long double acc = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  }
  return acc;
}

std::vector<std::size_t> colex_unrank(std::size_t n, std::size_t k, std::uint64_t rank) {
  if (k > n) throw InvalidArgument("colex_unrank: k > n");
  if (rank >= binomial(n, k)) throw InvalidArgument("colex_unrank: rank out of range");
  std::vector<std::size_t> pos(k);
  std::size_t hi = n;
  for (std::size_t i = k; i-- > 0;) {
    // Largest c < hi with C(c, i + 1) <= rank.
    std::size_t c = hi - 1;
    while (binomial(c, i + 1) > rank) --c;
    pos[i] = c;
    rank -= binomial(c, i + 1);
    hi = c;
  }
  return pos;
}

std::uint64_t colex_rank(const std::vector<std::size_t>& positions) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) r += binomial(positions[i], i + 1);
  return r;
}

bool colex_next(std::vector<std::size_t>& positions, std::size_t n) {
  const std::size_t k = positions.size();
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t limit = j + 1 < k ? positions[j + 1] : n;
    if (positions[j] + 1 < limit) {
      ++positions[j];
      for (std::size_t i = 0; i < j; ++i) positions[i] = i;
      return true;
    }
  }
  return false;
}

CruelEnumerator::CruelEnumerator(std::size_t n_u, std::size_t max_weight)
    : n_u_(n_u), max_weight_(max_weight) {
  if (max_weight > n_u) throw InvalidArgument("CruelEnumerator: max_weight exceeds n_u");
}

bool CruelEnumerator::next(std::vector<std::uint8_t>& bits) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
  } else if (!colex_next(positions_, n_u_)) {
    if (weight_ == max_weight_) {
      done_ = true;
      return false;
    }
    ++weight_;
    positions_.resize(weight_);
    std::iota(positions_.begin(), positions_.end(), std::size_t{0});
  }
  bits.assign(n_u_, 0);
  for (std::size_t p : positions_) bits[p] = 1;
  return true;
}

}  // namespace slwe
