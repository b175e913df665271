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

#ifndef SLWE_STATTEST_HPP_
#define SLWE_STATTEST_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "slwe/modmath.hpp"

namespace slwe {

/// Raised by min_samples when the signal variance is not below uniform.
class Indistinguishable : public std::domain_error {
 public:
  Indistinguishable() : std::domain_error("indistinguishable configuration") {}
};

struct TestConfig {
  double alpha = 1e-9;
  double beta = 1e-2;
  std::size_t M = 0;

  void validate() const;
};

struct UniformMoments {
  double sigma2 = 0.0;     ///< q^2 / 12
  double sigma2_sq = 0.0;  ///< Variance of x^2: sigma2 (q^2 - 4) / 15
};

UniformMoments uniform_moments(const Modulus& q);

struct WrappedMoments {
  double sigma2 = 0.0;     ///< E[x^2]
  double fourth = 0.0;     ///< E[x^4]
  double sigma2_sq = 0.0;  ///< E[x^4] - E[x^2]^2
};

/// Moments of N(0, v) reduced into (-q/2, q/2], by Gauss-Legendre quadrature
/// over every wrap whose mass exceeds the tail bound.
WrappedMoments gaussian_mod_moments(double v, const Modulus& q);

/// Variance of the wrapped Gaussian: gaussian_mod_moments(v, q).sigma2.
double f_q(double v, const Modulus& q);

double normal_cdf(double x);
/// Standard normal percent point function, accurate to ~1e-15 relative down
/// to p = 1e-300.
double normal_quantile(double p);

/// Lower confidence bound on the mean square of M uniform residuals.
double iota(double alpha, std::size_t M, const Modulus& q);

/// Unrounded sample-size formula; throws Indistinguishable.
double min_samples_real(double alpha, double beta, double v_signal, const Modulus& q);
/// ceil(min_samples_real).
std::uint64_t min_samples(double alpha, double beta, double v_signal, const Modulus& q);

/// (1/M) sum x_i^2 over centered residuals.
double variance_statistic(std::span<const std::int64_t> residuals);

/// True iff variance_statistic < iota(alpha, M, q). Requires M >= 30.
bool distinguish(std::span<const std::int64_t> residuals, double alpha, const Modulus& q);

/// Immutable cache of wrapped moments for a fixed modulus.
class MomentTable {
 public:
  MomentTable(const Modulus& q, std::span<const double> variances);

  const Modulus& modulus() const { return q_; }
  /// Throws std::out_of_range for a variance not in the table.
  const WrappedMoments& at(double v) const;
  const std::map<double, WrappedMoments>& entries() const { return entries_; }

 private:
  Modulus q_;
  std::map<double, WrappedMoments> entries_;
};

/// Reference reduced-dataset statistics used as estimator defaults.
struct ReferenceDataset {
  std::size_t n;
  int log2q;
  int beta1;
  int beta2;
  double rho;
  double hours_per_matrix;
  double sigma_e_ratio;
  std::size_t n_u;
  double rho2n;
};

std::span<const ReferenceDataset> reference_datasets();
std::optional<ReferenceDataset> find_reference(std::size_t n, int log2q);

struct SampleSizeQuery {
  std::size_t n = 0;
  int log2q = 0;
  std::size_t n_u = 0;
  std::size_t h = 0;
  std::optional<double> rho;             ///< Used to derive sigma_r when sigma_r_ratio is absent.
  std::optional<double> sigma_r_ratio;   ///< sigma_r / sigma_u
  double sigma_e_ratio = 0.0;            ///< sigma_e / sigma_u
  double alpha = 0.0;
  double beta = 0.0;
};

struct SampleSizeEstimate {
  double sigma_r_ratio = 0.0;
  double h_r_worst = 0.0;
  double h_r_average = 0.0;
  double v_worst = 0.0;
  double v_average = 0.0;
  std::optional<double> M_worst;    ///< Absent when indistinguishable.
  std::optional<double> M_average;
};

/// Worst case h_r = h and average case h_r = h n_r / n, with
/// v = h_r sigma_r^2 + sigma_e^2.
SampleSizeEstimate estimate_sample_sizes(const SampleSizeQuery& query);

void to_json(nlohmann::json& j, const SampleSizeEstimate& e);

}  // namespace slwe

#endif  // SLWE_STATTEST_HPP_
