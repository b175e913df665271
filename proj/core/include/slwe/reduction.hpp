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

#ifndef SLWE_REDUCTION_HPP_
#define SLWE_REDUCTION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slwe/instance.hpp"
#include "slwe/modmath.hpp"
#include "slwe/rng.hpp"

namespace slwe {

/// Penalized q-ary basis
///
///     [ 0       q I_n ]
///     [ w I_m   A     ]
///
/// stored row-major with the n q-vectors first. Dimensions (m + n) x (m + n).
struct Embedding {
  IntMatrix basis;
  std::int64_t omega = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::int64_t q = 0;
};

struct ReductionConfig {
  std::int64_t omega = 10;
  std::optional<double> tau;  ///< Stop as soon as rho <= tau.
  std::size_t stall_window = 3;
  double stall_epsilon = 0.001;
  double lll_delta = 0.99;
  std::optional<std::string> external_reducer;  ///< Command: CMD IN.mat OUT.mat
  std::optional<std::pair<int, int>> block_sizes;  ///< Forwarded to the external reducer.
  std::size_t subsample_m = 0;  ///< 0 means round(0.875 n).
  std::size_t max_phase_runs = 64;

  void validate() const;
  std::size_t rows_for(std::size_t n) const;
};

void to_json(nlohmann::json& j, const ReductionConfig& c);
void from_json(const nlohmann::json& j, ReductionConfig& c);

struct Subsample {
  IntMatrix A;
  IntVector b;
  std::vector<std::size_t> row_indices;
};

/// m distinct rows chosen uniformly (indices returned ascending); m == m_total
/// keeps every row in order.
Subsample subsample(const LweInstance& instance, std::size_t m, Rng& rng);

Embedding embed(const IntMatrix& A_sub, const Modulus& q, std::int64_t omega);

struct LllStats {
  std::size_t swaps = 0;
  std::size_t size_reductions = 0;
  std::size_t restarts = 0;
};

/// LLL with floating-point Gram-Schmidt over an exact integer Gram matrix.
/// Output rows satisfy |mu_ij| <= 1/2 and the Lovasz condition for `delta`
/// (relative slack 1e-9). Throws InvalidArgument when rows are dependent.
IntMatrix lll_reduce(const IntMatrix& basis, double delta, LllStats* stats = nullptr);

struct PolishStats {
  std::size_t steps = 0;
  std::size_t sweeps = 0;
  std::size_t zero_rows = 0;
};

/// Pairwise integer size reduction: r_i <- r_i - round(<r_i,r_j>/<r_j,r_j>) r_j
/// whenever that strictly shortens r_i, repeated to a fixed point. Zero rows
/// are skipped.
IntMatrix polish(const IntMatrix& basis, PolishStats* stats = nullptr);

/// Squared Frobenius norm, exact.
i128 frobenius_sq(const IntMatrix& m);

/// rho = stdev(centered A_red) / (q / sqrt(12)); 0 for an all-zero matrix.
double rho(const IntMatrix& A_red, const Modulus& q);

/// rho of the reduced-sample block of an embedding basis (rows whose
/// transformation part is nonzero).
double basis_rho(const IntMatrix& basis, std::size_t m, std::size_t n, const Modulus& q);

/// One reduction stage of the interleave controller.
struct ReductionPhase {
  std::string name;
  std::function<IntMatrix(const IntMatrix&)> run;
};

/// Runs CMD IN OUT through the shell, exchanging bases as matrix files.
/// Block sizes travel in SLWE_BETA1 / SLWE_BETA2.
IntMatrix run_external_reducer(const std::string& command, const IntMatrix& basis,
                               std::optional<std::pair<int, int>> block_sizes = std::nullopt);

/// Built-in phases: LLL and a polish-only stage, or LLL and the external
/// reducer when one is configured.
std::vector<ReductionPhase> default_phases(const ReductionConfig& config);

struct ReductionEvent {
  std::string phase;
  std::size_t run = 0;  ///< 0 is the initial measurement.
  double rho = 0.0;
  bool stalled = false;
};

using ProgressSink = std::function<void(const ReductionEvent&)>;

struct ReductionOutcome {
  IntMatrix basis;
  double rho = 1.0;
  std::size_t phase_runs = 0;
  std::string stop_reason;
  std::vector<ReductionEvent> trace;
};

/// Alternates phases, polishing after each run. A phase stalls when its last
/// `stall_window` runs improved rho by less than `stall_epsilon` on average;
/// the controller then switches phase. It stops when rho <= tau, or when two
/// consecutive episodes (one per phase) together improve rho by less than
/// `stall_epsilon`.
ReductionOutcome interleaved_reduce(const Embedding& embedding, const ReductionConfig& config,
                                    std::span<const ReductionPhase> phases,
                                    const ProgressSink& sink = {});
ReductionOutcome interleaved_reduce(const Embedding& embedding, const ReductionConfig& config,
                                    const ProgressSink& sink = {});

struct ReducedDataset {
  IntMatrix A_red;
  IntVector b_red;
  IntMatrix R;  ///< rows x m_sub exact transformation.
  std::vector<std::size_t> row_indices;  ///< Original rows behind R's columns.
  std::size_t source_rows = 0;           ///< Row count of the original instance.
  double rho = 1.0;
  LweParams params;
  ReductionConfig config;
  std::uint64_t seed = 0;
  std::size_t index = 0;

  /// R scattered to act on all `source_rows` original rows.
  IntMatrix expanded_R() const;
};

/// Reads R = left block / omega from a reduced embedding, drops rows whose R
/// is zero, and recomputes A_red = R A_sub, b_red = R b_sub mod q. Throws
/// std::runtime_error if a left block is not divisible by omega or the right
/// block disagrees with R A_sub mod q.
ReducedDataset extract(const IntMatrix& reduced, std::int64_t omega, std::size_t m, std::size_t n,
                       const IntMatrix& A_sub, std::span<const std::int64_t> b_sub,
                       const Modulus& q);

/// subsample -> embed -> interleaved_reduce -> extract for one (seed, index).
ReducedDataset reduce_one(const LweInstance& instance, const ReductionConfig& config,
                          std::uint64_t seed, std::size_t index, const ProgressSink& sink = {});

struct FactoryItem {
  std::size_t index = 0;
  std::optional<ReducedDataset> dataset;
  std::string error;
};

/// `count` independent pipelines, each deterministic in (seed, index), run on
/// up to `parallelism` worker threads. Failures are reported per item.
std::vector<FactoryItem> dataset_factory(const LweInstance& instance,
                                         const ReductionConfig& config, std::size_t count,
                                         std::size_t parallelism, std::uint64_t seed);

/// Vertical concatenation of reduced samples.
struct SamplePool {
  IntMatrix A;
  IntVector b;
};
SamplePool pool_samples(std::span<const ReducedDataset> datasets);

void save_dataset(const std::filesystem::path& dir, const ReducedDataset& ds);
ReducedDataset load_dataset(const std::filesystem::path& dir);
/// Writes each dataset to ROOT/matrix_NNNN (NNNN = index) and lists them in
/// ROOT/index.json.
void save_datasets(const std::filesystem::path& root, std::span<const ReducedDataset> datasets);
/// Loads every dataset listed in DIR/index.json.
std::vector<ReducedDataset> load_datasets(const std::filesystem::path& root);

}  // namespace slwe

#endif  // SLWE_REDUCTION_HPP_
