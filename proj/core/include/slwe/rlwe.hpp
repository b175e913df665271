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

#ifndef SLWE_RLWE_HPP_
#define SLWE_RLWE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slwe/attack.hpp"
#include "slwe/instance.hpp"
#include "slwe/modmath.hpp"
#include "slwe/profile.hpp"
#include "slwe/reduction.hpp"
#include "slwe/rng.hpp"

namespace slwe {

/// Coefficients of x^k v(x) mod x^n + 1 (v as a row vector times X^k).
/// One step maps (v_0, ..., v_{n-1}) to (-v_{n-1}, v_0, ..., v_{n-2}).
IntVector shift_vector(std::span<const std::int64_t> v, std::int64_t k);

/// X with X[i][i+1] = 1 and X[n-1][0] = -1, so v X = shift_vector(v, 1).
IntMatrix shift_operator(std::size_t n);

/// A X^k: every row shifted by k.
IntMatrix shift_rows(const IntMatrix& A, std::int64_t k);

struct RotatedSamples {
  IntMatrix A;
  IntVector b;
};

/// A_k = A_red X^k and b_k = (R X^k) b_circ, with R the expanded
/// transformation split into n-wide blocks, each shifted by k.
RotatedSamples rotate_samples(const ReducedDataset& ds, std::span<const std::int64_t> b_circ,
                              std::int64_t k);

/// A_k recomputed as (R X^k) A_circ mod q, for cross-checking.
IntMatrix rotate_via_transform(const ReducedDataset& ds, const IntMatrix& A_circ, std::int64_t k);

/// R X^k over the expanded transformation.
IntMatrix shifted_transform(const ReducedDataset& ds, std::size_t n, std::int64_t k);

struct WindowStats {
  std::vector<std::size_t> h_windows;  ///< Entry i: weight of s_i .. s_{i+n_u-1} cyclically.
  std::size_t h1_u = 0;
  std::size_t argmin = 0;              ///< Smallest i attaining h1_u.
};

WindowStats window_weights(const Secret& secret, std::size_t n_u);

/// Attack data for rotation k: rotated pooled samples, cruel columns moved by k.
AttackData rotated_attack_data(std::span<const ReducedDataset> datasets,
                               const RlweInstance& instance, const ColumnProfile& prof,
                               std::int64_t k);

/// Lockstep search over rotations 0, stride, 2 stride, ... < n; success is
/// verified against the circulant samples.
AttackReport run_rlwe_attack(std::span<const ReducedDataset> datasets,
                             const RlweInstance& instance, const ColumnProfile& prof,
                             const SearchConfig& config, const TestConfig& test,
                             std::size_t stride);

/// P(h_u >= k) when h_u counts ones among n_u of n positions holding h ones.
long double hypergeometric_tail(std::size_t n, std::size_t h, std::size_t n_u, std::size_t k);

/// sum_{j <= w} C(n_u, j)
long double candidate_count(std::size_t n_u, std::size_t w);

struct RlweCostModel {
  double c = 1.0;  ///< Cost per candidate per sample.
  double M = 1.0;  ///< Samples per check.
};

struct CostEstimate {
  long double T_lwe = 0.0L;
  long double T_rlwe = 0.0L;
  long double ratio = 0.0L;
  std::vector<double> h1_tail;  ///< Empirical P(h1_u >= k), k = 0..h.
};

/// T_lwe from the hypergeometric law of h_u; T_rlwe from the empirical law of
/// h1_u over `num_secrets` weight-h secrets drawn from `rng`.
CostEstimate estimate_costs(const RlweCostModel& model, std::size_t n, std::size_t n_u,
                            std::size_t h, std::size_t num_secrets, Rng& rng);

/// T = b + a sum_{k <= h_u} C(n_u, k)
struct TimeModel {
  double a = 0.0;
  double b = 0.0;
  double predict(std::size_t n_u, std::size_t h_u) const;
};

/// Least-squares fit of TimeModel to (h_u, time) observations.
TimeModel fit_time_model(std::size_t n_u, std::span<const std::pair<std::size_t, double>> points);

}  // namespace slwe

#endif  // SLWE_RLWE_HPP_
