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

#ifndef SLWE_ATTACK_HPP_
#define SLWE_ATTACK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slwe/instance.hpp"
#include "slwe/modmath.hpp"
#include "slwe/profile.hpp"
#include "slwe/reduction.hpp"
#include "slwe/stattest.hpp"

namespace slwe {

struct CandidateState {
  std::vector<std::uint8_t> cruel_bits;
  double score = 0.0;
  std::size_t weight = 0;
  std::uint64_t index = 0;  ///< Position in the ascending-weight enumeration.
};

struct SearchConfig {
  std::size_t max_weight = 4;
  std::size_t top_k = 64;
  std::uint64_t eval_interval = 40000000;
  std::size_t batch_size = 4096;
  std::size_t M_bruteforce = 0;  ///< 0: min_samples at the worst-case signal, capped by the pool.
  std::size_t M_greedy = 0;      ///< 0: every pooled sample.
  std::size_t jobs = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const SearchConfig& c);
void from_json(const nlohmann::json& j, SearchConfig& c);

/// Reduced samples plus the column split the search runs against.
struct AttackData {
  IntMatrix A;
  IntVector b;
  std::vector<std::size_t> cruel;  ///< Ascending column indices.
  std::vector<std::size_t> cool;   ///< Complement of cruel, ascending.
  std::int64_t q = 0;
  std::size_t h = 0;              ///< Public Hamming weight.
  double sigma_r = 0.0;           ///< Cool-column stdev.
  double error_variance = 0.0;    ///< sigma_e^2 times the mean squared row norm of R.

  std::size_t n() const { return A.cols(); }
};

/// Pools the datasets and takes the column split from `prof`.
AttackData prepare_attack_data(std::span<const ReducedDataset> datasets, const ColumnProfile& prof,
                               const LweParams& params);

/// Mean square of center(A_cruel c - b) over the first M rows, for each pattern.
std::vector<double> score_batch(std::span<const std::vector<std::uint8_t>> candidates,
                                const IntMatrix& A_cruel, std::span<const std::int64_t> b,
                                const Modulus& q);

/// Scores cruel patterns given as sorted position lists.
class CruelScorer {
 public:
  CruelScorer(const IntMatrix& A, std::span<const std::int64_t> b,
              std::span<const std::size_t> cruel, std::size_t M, const Modulus& q);

  std::size_t n_u() const { return cols_.size(); }
  std::size_t samples() const { return m_; }
  double score(std::span<const std::size_t> positions) const;

  using Visitor = std::function<void(const std::vector<std::size_t>& positions, double score)>;
  /// Visits weight-w patterns with colex ranks in [r0, r1), in rank order.
  void scan(std::size_t weight, std::uint64_t r0, std::uint64_t r1, const Visitor& visit) const;

 private:
  std::vector<IntVector> cols_;
  IntVector neg_b_;
  std::size_t m_;
  std::int64_t q_;
};

/// Greedy cool recovery: each index of `order` is decided in turn by comparing the
/// mean square residual with the bit at 0 and at 1; a tie keeps 0.
Secret greedy_cool(const Secret& s_star, const IntMatrix& A, std::span<const std::int64_t> b,
                   std::span<const std::size_t> order, std::size_t M_greedy, const Modulus& q);
Secret greedy_cool(const Secret& s_star, const AttackData& data, std::size_t M_greedy);

struct AttackReport {
  std::optional<Secret> recovered;
  std::uint64_t candidates_scored = 0;
  std::optional<std::size_t> h_u_found;
  std::optional<std::size_t> window;  ///< Rotation that succeeded (RLWE).
  std::size_t evaluations = 0;
  std::size_t greedy_runs = 0;
  std::size_t M_bruteforce = 0;
  std::size_t M_greedy = 0;
  double iota = 0.0;
  double elapsed = 0.0;
  std::map<std::string, double> stage_timings;
};

/// Deterministic part of the report (timings excluded) plus timings under "timings".
void to_json(nlohmann::json& j, const AttackReport& r);

/// M_bruteforce actually used for `data` under `config`.
std::size_t bruteforce_samples(const AttackData& data, const SearchConfig& config,
                               const TestConfig& test);

/// Ascending-weight search with periodic greedy completion; success requires
/// verify_secret on (A_orig, b_orig).
AttackReport run_attack(const AttackData& data, const IntMatrix& A_orig,
                        std::span<const std::int64_t> b_orig, const SearchConfig& config,
                        const TestConfig& test);

/// Multi-window variant: every window shares the secret and is searched in
/// lockstep by weight.
AttackReport run_windows(std::span<const AttackData> windows, std::span<const std::size_t> labels,
                         const IntMatrix& A_orig, std::span<const std::int64_t> b_orig,
                         const SearchConfig& config, const TestConfig& test);

}  // namespace slwe

#endif  // SLWE_ATTACK_HPP_
