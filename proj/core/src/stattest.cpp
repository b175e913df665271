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

#include "slwe/stattest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "slwe/profile.hpp"

namespace slwe {
namespace {

constexpr int kNodes = 24;
// Each wrap is integrated over +-kTail standard deviations; the discarded
// two-sided mass is below 1e-17.
constexpr long double kTail = 8.5L;

struct Legendre {
  std::array<long double, kNodes> x{};
  std::array<long double, kNodes> w{};
};

const Legendre& legendre() {
  static const Legendre rule = [] {
    Legendre r;
    const long double pi = std::numbers::pi_v<long double>;
    for (int i = 0; i < kNodes; ++i) {
      long double z = std::cos(pi * (i + 0.75L) / (kNodes + 0.5L));
      long double dp = 0.0L;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1.0L;
        long double p1 = z;
        for (int k = 2; k <= kNodes; ++k) {
          const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kNodes * (z * p1 - p0) / (z * z - 1.0L);
        const long double step = p1 / dp;
        z -= step;
        if (std::fabs(step) < 1e-19L) break;
      }
      r.x[i] = z;
      r.w[i] = 2.0L / ((1.0L - z * z) * dp * dp);
    }
    return r;
  }();
  return rule;
}

}  // namespace

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
}

UniformMoments uniform_moments(const Modulus& q) {
  const double qd = q.as_double();
  const double s2 = qd * qd / 12.0;
  return {s2, s2 * (qd * qd - 4.0) / 15.0};
}

WrappedMoments gaussian_mod_moments(double v, const Modulus& q) {
  if (!(v >= 0.0)) throw InvalidArgument("gaussian_mod_moments: variance must be non-negative");
  if (v == 0.0) return {};
  const Legendre& gl = legendre();
  const long double qd = q.as_double();
  const long double half = qd / 2.0L;
  const long double sigma = std::sqrt(static_cast<long double>(v));
  const long double norm = 1.0L / (sigma * std::sqrt(2.0L * std::numbers::pi_v<long double>));
  const long double panel = std::min(sigma, qd);
  const auto K = static_cast<long long>(std::ceil((kTail * sigma + half) / qd));

  long double mass = 0.0L;
  long double m2 = 0.0L;
  long double m4 = 0.0L;
  for (long long k = -K; k <= K; ++k) {
    const long double c = -static_cast<long double>(k) * qd;
    const long double lo = std::max(-half, c - kTail * sigma);
    const long double hi = std::min(half, c + kTail * sigma);
    if (!(lo < hi)) continue;
    const auto panels = static_cast<long long>(std::ceil((hi - lo) / panel));
    const long double width = (hi - lo) / static_cast<long double>(panels);
    for (long long pnl = 0; pnl < panels; ++pnl) {
      const long double a = lo + width * static_cast<long double>(pnl);
      const long double mid = a + width / 2.0L;
      for (int i = 0; i < kNodes; ++i) {
        const long double x = mid + gl.x[i] * width / 2.0L;
        const long double z = (x - c) / sigma;
        const long double f = gl.w[i] * width / 2.0L * norm * std::exp(-0.5L * z * z);
        const long double x2 = x * x;
        mass += f;
        m2 += f * x2;
        m4 += f * x2 * x2;
      }
    }
  }
  m2 /= mass;
  m4 /= mass;
  WrappedMoments out;
  out.sigma2 = static_cast<double>(m2);
  out.fourth = static_cast<double>(m4);
  out.sigma2_sq = static_cast<double>(m4 - m2 * m2);
  return out;
}

double f_q(double v, const Modulus& q) { return gaussian_mod_moments(v, q).sigma2; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must lie in (0, 1)");
  if (p > 0.5) return -normal_quantile(1.0 - p);
  const long double pl = p;
  long double x;
  if (p < 1e-16) {
    const long double t = 2.0L * std::log(1.0L / pl);
    x = -std::sqrt(t - std::log(t) - std::log(2.0L * std::numbers::pi_v<long double>));
  } else if (p < 0.02425) {
    // Lower-tail rational approximation (Acklam).
    const long double r = std::sqrt(-2.0L * std::log(pl));
    x = (((((-7.784894002430293e-03L * r - 3.223964580411365e-01L) * r - 2.400758277161838e+00L) *
               r -
           2.549732539343734e+00L) *
              r +
          4.374664141464968e+00L) *
             r +
         2.938163982698783e+00L) /
        ((((7.784695709041462e-03L * r + 3.224671290700398e-01L) * r + 2.445134137142996e+00L) *
              r +
          3.754408661907416e+00L) *
             r +
         1.0L);
  } else {
    const long double u = pl - 0.5L;
    const long double r = u * u;
    x = (((((-3.969683028665376e+01L * r + 2.209460984245205e+02L) * r - 2.759285104469687e+02L) *
               r +
           1.383577518672690e+02L) *
              r -
          3.066479806614716e+01L) *
             r +
         2.506628277459239e+00L) *
        u /
        (((((-5.447609879822406e+01L * r + 1.615858368580409e+02L) * r - 1.556989798598866e+02L) *
               r +
           6.680131188771972e+01L) *
              r -
          1.328068155288572e+01L) *
             r +
         1.0L);
  }
  const long double sqrt2pi = std::sqrt(2.0L * std::numbers::pi_v<long double>);
  for (int it = 0; it < 6; ++it) {
    const long double cdf = 0.5L * std::erfc(-x / std::sqrt(2.0L));
    const long double e = cdf - pl;
    const long double u = e * sqrt2pi * std::exp(0.5L * x * x);
    const long double step = u / (1.0L + 0.5L * x * u);
    x -= step;
    if (std::fabs(step) <= 1e-18L * std::max(1.0L, std::fabs(x))) break;
  }
  return static_cast<double>(x);
}

double iota(double alpha, std::size_t M, const Modulus& q) {
  if (M == 0) throw InvalidArgument("iota: M must be positive");
  const UniformMoments u = uniform_moments(q);
  return u.sigma2 + normal_quantile(alpha) * std::sqrt(u.sigma2_sq / static_cast<double>(M));
}

double min_samples_real(double alpha, double beta, double v_signal, const Modulus& q) {
  TestConfig{alpha, beta, 0}.validate();
  const UniformMoments u = uniform_moments(q);
  const WrappedMoments g = gaussian_mod_moments(v_signal, q);
  if (!(g.sigma2 < u.sigma2)) throw Indistinguishable();
  const double num = normal_quantile(alpha) * std::sqrt(u.sigma2_sq) +
                     normal_quantile(beta) * std::sqrt(std::max(g.sigma2_sq, 0.0));
  const double r = num / (g.sigma2 - u.sigma2);
  return r * r;
}

std::uint64_t min_samples(double alpha, double beta, double v_signal, const Modulus& q) {
  return static_cast<std::uint64_t>(std::ceil(min_samples_real(alpha, beta, v_signal, q)));
}

double variance_statistic(std::span<const std::int64_t> residuals) {
  if (residuals.empty()) throw InvalidArgument("variance_statistic: empty input");
  long double acc = 0.0L;
  for (std::int64_t x : residuals) {
    const auto d = static_cast<long double>(x);
    acc += d * d;
  }
  return static_cast<double>(acc / static_cast<long double>(residuals.size()));
}

bool distinguish(std::span<const std::int64_t> residuals, double alpha, const Modulus& q) {
  if (residuals.size() < 30) throw InvalidArgument("distinguish: need at least 30 residuals");
  return variance_statistic(residuals) < iota(alpha, residuals.size(), q);
}

MomentTable::MomentTable(const Modulus& q, std::span<const double> variances) : q_(q) {
  for (double v : variances) entries_.emplace(v, gaussian_mod_moments(v, q));
}

const WrappedMoments& MomentTable::at(double v) const {
  auto it = entries_.find(v);
  if (it == entries_.end()) throw std::out_of_range("MomentTable: variance not tabulated");
  return it->second;
}

namespace {

constexpr std::array<ReferenceDataset, 4> kReference{{
    {256, 12, 35, 40, 0.769, 15.0, 0.952, 143, 151.3},
    {512, 28, 18, 22, 0.677, 12.0, 0.692, 228, 234.6},
    {512, 41, 18, 22, 0.413, 13.1, 0.337, 75, 87.3},
    {768, 35, 18, 22, 0.710, 15.0, 0.938, 373, 387.1},
}};

}  // namespace

std::span<const ReferenceDataset> reference_datasets() { return kReference; }

std::optional<ReferenceDataset> find_reference(std::size_t n, int log2q) {
  for (const auto& r : kReference)
    if (r.n == n && r.log2q == log2q) return r;
  return std::nullopt;
}

SampleSizeEstimate estimate_sample_sizes(const SampleSizeQuery& query) {
  if (query.n == 0 || query.n_u > query.n) throw InvalidArgument("estimate: need 0 <= n_u <= n");
  if (query.log2q < 2 || query.log2q > 41) throw InvalidArgument("estimate: log2q out of range");
  const Modulus q(std::int64_t{1} << query.log2q);
  const double sigma_u = q.uniform_stdev();
  SampleSizeEstimate e;
  if (query.sigma_r_ratio) {
    e.sigma_r_ratio = *query.sigma_r_ratio;
  } else if (query.rho) {
    const auto r = predict_sigma_r_ratio(*query.rho, query.n, query.n_u);
    if (!r) throw InvalidArgument("estimate: rho^2 n < n_u leaves sigma_r undefined");
    e.sigma_r_ratio = *r;
  } else {
    throw InvalidArgument("estimate: need rho or sigma_r");
  }
  const double sr = e.sigma_r_ratio * sigma_u;
  const double se = query.sigma_e_ratio * sigma_u;
  const double n_r = static_cast<double>(query.n - query.n_u);
  e.h_r_worst = static_cast<double>(query.h);
  e.h_r_average = n_r / static_cast<double>(query.n) * static_cast<double>(query.h);
  e.v_worst = e.h_r_worst * sr * sr + se * se;
  e.v_average = e.h_r_average * sr * sr + se * se;
  auto sized = [&](double v) -> std::optional<double> {
    try {
      return min_samples_real(query.alpha, query.beta, v, q);
    } catch (const Indistinguishable&) {
      return std::nullopt;
    }
  };
  e.M_worst = sized(e.v_worst);
  e.M_average = sized(e.v_average);
  return e;
}

void to_json(nlohmann::json& j, const SampleSizeEstimate& e) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = nlohmann::json{{"sigma_r_ratio", e.sigma_r_ratio}, {"h_r_worst", e.h_r_worst},
                     {"h_r_average", e.h_r_average},     {"v_worst", e.v_worst},
                     {"v_average", e.v_average},         {"M_worst", opt(e.M_worst)},
                     {"M_average", opt(e.M_average)}};
}

}  // namespace slwe
