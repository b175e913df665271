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

#ifndef SLWE_INSTANCE_HPP_
#define SLWE_INSTANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "slwe/modmath.hpp"
#include "slwe/rng.hpp"

namespace slwe {

/// Public description of an LWE problem with a sparse binary secret.
struct LweParams {
  std::size_t n = 0;
  std::int64_t q = 0;
  std::size_t h = 0;        ///< Hamming weight of the secret.
  double sigma_e = 3.0;     ///< Error standard deviation before rounding.
  std::size_t m_total = 0;  ///< Number of public samples; 0 means 4n.
  std::int64_t omega = 10;  ///< Embedding penalty.

  /// Throws InvalidArgument unless 0 < h <= n, sigma_e > 0, m_total >= n, omega >= 1.
  void validate() const;
  Modulus modulus() const { return Modulus(q); }
  std::size_t samples() const { return m_total == 0 ? 4 * n : m_total; }
};

void to_json(nlohmann::json& j, const LweParams& p);
void from_json(const nlohmann::json& j, LweParams& p);

/// Binary secret s in {0,1}^n.
struct Secret {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::size_t weight() const;
  IntVector as_vector() const;
  static Secret from_vector(std::span<const std::int64_t> v);
  friend bool operator==(const Secret&, const Secret&) = default;
};

struct LweInstance {
  LweParams params;
  IntMatrix A;  ///< m_total x n, centered mod q.
  IntVector b;  ///< center(A s + e).
  std::optional<Secret> secret;     ///< Ground truth, fixtures only.
  std::optional<IntVector> error;   ///< Ground truth, fixtures only.
  std::uint64_t seed = 0;
};

/// 2-power cyclotomic instance over Z_q[x]/(x^n + 1). Each of the
/// `a_polys.rows()` polynomials contributes an n x n skew-circulant block;
/// `lwe.A` is the vertical stack of those blocks and `lwe.b` the matching b.
struct RlweInstance {
  LweInstance lwe;
  IntMatrix a_polys;  ///< num_polys x n coefficient rows.

  std::size_t num_polys() const { return a_polys.rows(); }
  const IntMatrix& A_circ() const { return lwe.A; }
  const IntVector& b_circ() const { return lwe.b; }
};

/// Uniform weight-h secret. h == 0 is rejected unless allow_zero is set.
Secret gen_secret(std::size_t n, std::size_t h, Rng& rng, bool allow_zero = false);

/// Rounded continuous Gaussian error of standard deviation sigma.
IntVector gen_error(std::size_t m, double sigma, Rng& rng);

LweInstance gen_lwe(const LweParams& params, const Secret& secret, Rng& rng);

/// Column j holds the coefficients of x^j a(x) mod x^n + 1.
IntMatrix skew_circulant(std::span<const std::int64_t> a, const Modulus& q);

/// num_polys == 0 derives the count from params.samples() / n (at least 1).
RlweInstance gen_rlwe(const LweParams& params, const Secret& secret, Rng& rng,
                      std::size_t num_polys = 0);

bool is_power_of_two(std::size_t n);

/// Sample standard deviation of center(A s - b) over all rows.
double residual_stdev(const IntMatrix& A, std::span<const std::int64_t> b, const Secret& s,
                      const Modulus& q);

/// Acceptance threshold for a full-secret check: q / (4 sqrt(12)).
double verify_threshold(const Modulus& q);

/// True iff residual_stdev on the original samples is below verify_threshold.
bool verify_secret(const IntMatrix& A, std::span<const std::int64_t> b, const Secret& candidate,
                   const Modulus& q);

// Instance directories: instance.json + A.mat + b.mat, plus secret.mat / e.mat
// when ground truth is written. RLWE directories add a_poly.mat and A_circ.mat.
void save_instance(const std::filesystem::path& dir, const LweInstance& inst, bool with_truth);
void save_instance(const std::filesystem::path& dir, const RlweInstance& inst, bool with_truth);
LweInstance load_instance(const std::filesystem::path& dir);
RlweInstance load_rlwe_instance(const std::filesystem::path& dir);
bool is_rlwe_instance(const std::filesystem::path& dir);

}  // namespace slwe

#endif  // SLWE_INSTANCE_HPP_
