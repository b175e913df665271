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

#include <limits>
#include <stdexcept>
#include <vector>

#include "slwe/reduction.hpp"

namespace slwe {
namespace {

// Nearest integer to num/den for den > 0, ties away from zero.
i128 round_div(i128 num, i128 den) {
  const bool neg = num < 0;
  const i128 a = neg ? -num : num;
  const i128 qt = (2 * a + den) / (2 * den);
  return neg ? -qt : qt;
}

}  // namespace

i128 frobenius_sq(const IntMatrix& m) {
  i128 acc = 0;
  for (std::int64_t x : m.data()) acc += static_cast<i128>(x) * x;
  return acc;
}

IntMatrix polish(const IntMatrix& basis, PolishStats* stats) {
  IntMatrix b = basis;
  const std::size_t d = b.rows();
  if (d == 0) return b;
  std::vector<i128> gram(d * d);
  auto g = [&](std::size_t i, std::size_t j) -> i128& { return gram[i * d + j]; };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const i128 v = dot(b.row(i), b.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }

  PolishStats local;
  bool changed = true;
  while (changed) {
    changed = false;
    ++local.sweeps;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (i == j || g(i, i) == 0 || g(j, j) == 0) continue;
        const i128 c = round_div(g(i, j), g(j, j));
        if (c == 0) continue;
        // ||r_i - c r_j||^2 - ||r_i||^2
        const i128 change = c * c * g(j, j) - 2 * c * g(i, j);
        if (change >= 0) continue;
        auto ri = b.row(i);
        auto rj = b.row(j);
        for (std::size_t t = 0; t < ri.size(); ++t) {
          const i128 v = static_cast<i128>(ri[t]) - c * rj[t];
          if (v > std::numeric_limits<std::int64_t>::max() ||
              v < std::numeric_limits<std::int64_t>::min()) {
            throw std::overflow_error("polish: basis entry exceeds 64-bit range");
          }
          ri[t] = static_cast<std::int64_t>(v);
        }
        g(i, i) += change;
        for (std::size_t t = 0; t < d; ++t) {
          if (t == i) continue;
          g(i, t) -= c * g(j, t);
          g(t, i) = g(i, t);
        }
        ++local.steps;
        changed = true;
        if (g(i, i) == 0) {
          ++local.zero_rows;
          break;
        }
      }
    }
  }
  if (stats) *stats = local;
  return b;
}

}  // namespace slwe
