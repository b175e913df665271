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

#ifndef SLWE_PROFILE_HPP_
#define SLWE_PROFILE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "slwe/instance.hpp"
#include "slwe/modmath.hpp"

namespace slwe {

/// Columns with stdev above threshold_factor * sigma_u are cruel.
inline constexpr double kCruelThreshold = 0.5;

struct ColumnProfile {
  std::vector<double> stdevs;
  std::size_t n_u = 0;
  std::size_t n_r = 0;
  double sigma_u = 0.0;
  double rho = 1.0;
  std::vector<std::size_t> cruel_columns;  ///< Ascending.
  std::vector<std::size_t> cool_columns;   ///< Ascending.
  /// RMS stdev over cool columns; absent when n_r = 0.
  std::optional<double> sigma_r_measured;
  /// sigma_u sqrt((rho^2 n - n_u) / n_r); absent when n_r = 0 or rho^2 n < n_u.
  std::optional<double> sigma_r_predicted;
  /// Set by callers holding ground truth (see estimate_sigma_e).
  std::optional<double> sigma_e_ratio;

  std::size_t n() const { return stdevs.size(); }
};

/// Per-column profile of reduced samples (rows of A_red). Needs >= 2 rows.
ColumnProfile profile(const IntMatrix& A_red, const Modulus& q,
                      double threshold_factor = kCruelThreshold);

/// sigma_r / sigma_u from the variance decomposition rho^2 n = n_u + n_r (sigma_r/sigma_u)^2.
std::optional<double> predict_sigma_r_ratio(double rho, std::size_t n, std::size_t n_u);

struct NuRhoReport {
  std::size_t n_u = 0;
  double rho2n = 0.0;
  double gap = 0.0;  ///< |n_u - rho^2 n| / n
};

NuRhoReport check_nu_rho(const ColumnProfile& p, double rho, std::size_t n);

/// (n_u sigma_u^2 + n_r sigma_r^2) / n against the mean column variance.
struct VarianceIdentity {
  double measured = 0.0;
  double predicted = 0.0;
  double relative_gap = 0.0;
};
VarianceIdentity variance_identity(const ColumnProfile& p);

/// Natural-log norms of the Gram-Schmidt vectors of the rows, in order.
/// Throws InvalidArgument on dependent rows.
std::vector<double> gs_profile(const IntMatrix& basis);

/// stdev of center(b_red - A_red s) divided by q / sqrt(12).
double estimate_sigma_e(const IntMatrix& A_red, std::span<const std::int64_t> b_red,
                        const Secret& secret, const Modulus& q);

void to_json(nlohmann::json& j, const ColumnProfile& p);
void write_profile_csv(std::ostream& out, const ColumnProfile& p);

}  // namespace slwe

#endif  // SLWE_PROFILE_HPP_
