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

#include "slwe/profile.hpp"

#include <cmath>
#include <stdexcept>

#include "slwe/reduction.hpp"

namespace slwe {

ColumnProfile profile(const IntMatrix& A_red, const Modulus& q, double threshold_factor) {
  if (!(threshold_factor > 0.0)) throw InvalidArgument("profile: threshold must be positive");
  ColumnProfile p;
  p.stdevs = column_stdev(A_red, q);
  p.sigma_u = q.uniform_stdev();
  p.rho = rho(A_red, q);
  const double cut = threshold_factor * p.sigma_u;
  double cool_sq = 0.0;
  for (std::size_t j = 0; j < p.stdevs.size(); ++j) {
    if (p.stdevs[j] > cut) {
      p.cruel_columns.push_back(j);
    } else {
      p.cool_columns.push_back(j);
      cool_sq += p.stdevs[j] * p.stdevs[j];
    }
  }
  p.n_u = p.cruel_columns.size();
  p.n_r = p.cool_columns.size();
  if (p.n_r > 0) {
    p.sigma_r_measured = std::sqrt(cool_sq / static_cast<double>(p.n_r));
    if (auto ratio = predict_sigma_r_ratio(p.rho, p.n(), p.n_u)) {
      p.sigma_r_predicted = *ratio * p.sigma_u;
    }
  }
  return p;
}

std::optional<double> predict_sigma_r_ratio(double rho, std::size_t n, std::size_t n_u) {
  if (n_u >= n) return std::nullopt;
  const double num = rho * rho * static_cast<double>(n) - static_cast<double>(n_u);
  if (num < 0.0) return std::nullopt;
  return std::sqrt(num / static_cast<double>(n - n_u));
}

NuRhoReport check_nu_rho(const ColumnProfile& p, double rho, std::size_t n) {
  if (n == 0) throw InvalidArgument("check_nu_rho: n must be positive");
  NuRhoReport r;
  r.n_u = p.n_u;
  r.rho2n = rho * rho * static_cast<double>(n);
  r.gap = std::fabs(static_cast<double>(p.n_u) - r.rho2n) / static_cast<double>(n);
  return r;
}

VarianceIdentity variance_identity(const ColumnProfile& p) {
  if (p.stdevs.empty()) throw InvalidArgument("variance_identity: empty profile");
  VarianceIdentity v;
  for (double s : p.stdevs) v.measured += s * s;
  v.measured /= static_cast<double>(p.n());
  const double sr = p.sigma_r_measured.value_or(0.0);
  v.predicted = (static_cast<double>(p.n_u) * p.sigma_u * p.sigma_u +
                 static_cast<double>(p.n_r) * sr * sr) /
                static_cast<double>(p.n());
  v.relative_gap = std::fabs(v.measured - v.predicted) / v.predicted;
  return v;
}

std::vector<double> gs_profile(const IntMatrix& basis) {
  const std::size_t d = basis.rows();
  const std::size_t w = basis.cols();
  std::vector<std::vector<long double>> star;
  std::vector<long double> norms;
  std::vector<double> out;
  star.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<long double> v(w);
    long double orig = 0.0L;
    for (std::size_t t = 0; t < w; ++t) {
      v[t] = static_cast<long double>(basis(i, t));
      orig += v[t] * v[t];
    }
    // Two rounds of modified Gram-Schmidt keep the projection accurate.
    for (int round = 0; round < 2; ++round) {
      for (std::size_t j = 0; j < star.size(); ++j) {
        long double dotp = 0.0L;
        for (std::size_t t = 0; t < w; ++t) dotp += v[t] * star[j][t];
        const long double mu = dotp / norms[j];
        for (std::size_t t = 0; t < w; ++t) v[t] -= mu * star[j][t];
      }
    }
    long double nsq = 0.0L;
    for (long double x : v) nsq += x * x;
    if (orig == 0.0L || nsq <= orig * 1e-24L) {
      throw InvalidArgument("gs_profile: rows are linearly dependent (row " + std::to_string(i) +
                            ")");
    }
    norms.push_back(nsq);
    star.push_back(std::move(v));
    out.push_back(static_cast<double>(0.5L * std::log(nsq)));
  }
  return out;
}

double estimate_sigma_e(const IntMatrix& A_red, std::span<const std::int64_t> b_red,
                        const Secret& secret, const Modulus& q) {
  if (A_red.rows() != b_red.size() || A_red.cols() != secret.size()) {
    throw InvalidArgument("estimate_sigma_e: dimension mismatch");
  }
  const IntVector sv = secret.as_vector();
  IntVector r(A_red.rows());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = q.center(b_red[i] - dot(A_red.row(i), sv));
  return centered_stdev(r, q) / q.uniform_stdev();
}

void to_json(nlohmann::json& j, const ColumnProfile& p) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  const NuRhoReport nr = check_nu_rho(p, p.rho, p.n());
  j = nlohmann::json{{"n", p.n()},
                     {"n_u", p.n_u},
                     {"n_r", p.n_r},
                     {"sigma_u", p.sigma_u},
                     {"rho", p.rho},
                     {"rho2n", nr.rho2n},
                     {"nu_rho_gap", nr.gap},
                     {"sigma_r_measured", opt(p.sigma_r_measured)},
                     {"sigma_r_predicted", opt(p.sigma_r_predicted)},
                     {"sigma_e_ratio", opt(p.sigma_e_ratio)},
                     {"sigma_r_defined", p.n_r > 0},
                     {"cruel_columns", p.cruel_columns},
                     {"stdevs", p.stdevs}};
}

void write_profile_csv(std::ostream& out, const ColumnProfile& p) {
  out << "column,stdev,ratio,cruel\n";
  std::size_t next_cruel = 0;
  for (std::size_t j = 0; j < p.n(); ++j) {
    const bool cruel = next_cruel < p.cruel_columns.size() && p.cruel_columns[next_cruel] == j;
    if (cruel) ++next_cruel;
    out << j << ',' << p.stdevs[j] << ',' << p.stdevs[j] / p.sigma_u << ',' << (cruel ? 1 : 0)
        << '\n';
  }
}

}  // namespace slwe
