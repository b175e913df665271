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

#include "slwe/rlwe.hpp"

#include <algorithm>
#include <cmath>

#include "slwe/enumerate.hpp"

namespace slwe {

IntVector shift_vector(std::span<const std::int64_t> v, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(v.size());
  if (!is_power_of_two(v.size())) throw InvalidArgument("shift_vector: length must be a power of two");
  const std::int64_t period = 2 * n;
  const std::int64_t kk = ((k % period) + period) % period;
  IntVector out(v.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t t = i + kk;
    const std::int64_t pos = t % n;
    const bool negate = (t / n) % 2 == 1;
    out[pos] = negate ? -v[i] : v[i];
  }
  return out;
}

IntMatrix shift_operator(std::size_t n) {
  if (!is_power_of_two(n)) throw InvalidArgument("shift_operator: n must be a power of two");
  IntMatrix X(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) X(i, i + 1) = 1;
  X(n - 1, 0) = -1;
  return X;
}

IntMatrix shift_rows(const IntMatrix& A, std::int64_t k) {
  IntMatrix out(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const IntVector r = shift_vector(A.row(i), k);
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

IntMatrix shifted_transform(const ReducedDataset& ds, std::size_t n, std::int64_t k) {
  if (ds.R.empty() && ds.A_red.rows() > 0) throw InvalidArgument("rotate: dataset has no R");
  const IntMatrix full = ds.expanded_R();
  if (n == 0 || full.cols() % n != 0) throw InvalidArgument("rotate: R width is not a multiple of n");
  IntMatrix out(full.rows(), full.cols());
  for (std::size_t i = 0; i < full.rows(); ++i) {
    auto row = full.row(i);
    for (std::size_t blk = 0; blk < full.cols(); blk += n) {
      const IntVector s = shift_vector(row.subspan(blk, n), k);
      std::copy(s.begin(), s.end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(blk));
    }
  }
  return out;
}

RotatedSamples rotate_samples(const ReducedDataset& ds, std::span<const std::int64_t> b_circ,
                              std::int64_t k) {
  const Modulus q = ds.params.modulus();
  const std::size_t n = ds.A_red.cols();
  if (b_circ.size() != ds.source_rows) throw InvalidArgument("rotate_samples: b_circ length");
  RotatedSamples out;
  out.A = shift_rows(ds.A_red, k);
  out.b = mat_vec_mod(shifted_transform(ds, n, k), b_circ, q);
  return out;
}

IntMatrix rotate_via_transform(const ReducedDataset& ds, const IntMatrix& A_circ, std::int64_t k) {
  return mat_mul_mod(shifted_transform(ds, A_circ.cols(), k), A_circ, ds.params.modulus());
}

WindowStats window_weights(const Secret& secret, std::size_t n_u) {
  const std::size_t n = secret.size();
  if (n_u > n) throw InvalidArgument("window_weights: n_u exceeds n");
  WindowStats w;
  w.h_windows.assign(n, 0);
  if (n == 0) return w;
  std::size_t cur = 0;
  for (std::size_t j = 0; j < n_u; ++j) cur += secret.bits[j];
  for (std::size_t i = 0; i < n; ++i) {
    w.h_windows[i] = cur;
    cur -= secret.bits[i];
    cur += secret.bits[(i + n_u) % n];
  }
  const auto it = std::min_element(w.h_windows.begin(), w.h_windows.end());
  w.h1_u = *it;
  w.argmin = static_cast<std::size_t>(it - w.h_windows.begin());
  return w;
}

AttackData rotated_attack_data(std::span<const ReducedDataset> datasets,
                               const RlweInstance& instance, const ColumnProfile& prof,
                               std::int64_t k) {
  std::vector<ReducedDataset> rotated;
  rotated.reserve(datasets.size());
  for (const auto& ds : datasets) {
    ReducedDataset r = ds;
    RotatedSamples s = rotate_samples(ds, instance.b_circ(), k);
    r.A_red = std::move(s.A);
    r.b_red = std::move(s.b);
    rotated.push_back(std::move(r));
  }
  ColumnProfile shifted = prof;
  const std::size_t n = prof.n();
  const auto kk = static_cast<std::size_t>(((k % static_cast<std::int64_t>(n)) +
                                            static_cast<std::int64_t>(n)) %
                                           static_cast<std::int64_t>(n));
  shifted.cruel_columns.clear();
  for (std::size_t c : prof.cruel_columns) shifted.cruel_columns.push_back((c + kk) % n);
  std::sort(shifted.cruel_columns.begin(), shifted.cruel_columns.end());
  shifted.cool_columns.clear();
  for (std::size_t j = 0, c = 0; j < n; ++j) {
    if (c < shifted.cruel_columns.size() && shifted.cruel_columns[c] == j) {
      ++c;
    } else {
      shifted.cool_columns.push_back(j);
    }
  }
  return prepare_attack_data(rotated, shifted, instance.lwe.params);
}

AttackReport run_rlwe_attack(std::span<const ReducedDataset> datasets,
                             const RlweInstance& instance, const ColumnProfile& prof,
                             const SearchConfig& config, const TestConfig& test,
                             std::size_t stride) {
  const std::size_t n = instance.lwe.params.n;
  if (stride == 0 || stride > n) throw InvalidArgument("run_rlwe_attack: stride must lie in [1, n]");
  std::vector<AttackData> windows;
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < n; k += stride) {
    windows.push_back(rotated_attack_data(datasets, instance, prof, static_cast<std::int64_t>(k)));
    labels.push_back(k);
  }
  return run_windows(windows, labels, instance.A_circ(), instance.b_circ(), config, test);
}

long double hypergeometric_tail(std::size_t n, std::size_t h, std::size_t n_u, std::size_t k) {
  if (h > n || n_u > n) throw InvalidArgument("hypergeometric_tail: h and n_u must be <= n");
  const long double total = binomial_ld(n, n_u);
  long double acc = 0.0L;
  for (std::size_t j = k; j <= std::min(h, n_u); ++j) {
    if (n_u - j > n - h) continue;
    acc += binomial_ld(h, j) * binomial_ld(n - h, n_u - j);
  }
  return acc / total;
}

long double candidate_count(std::size_t n_u, std::size_t w) {
  long double s = 0.0L;
  for (std::size_t j = 0; j <= std::min(w, n_u); ++j) s += binomial_ld(n_u, j);
  return s;
}

CostEstimate estimate_costs(const RlweCostModel& model, std::size_t n, std::size_t n_u,
                            std::size_t h, std::size_t num_secrets, Rng& rng) {
  if (num_secrets == 0) throw InvalidArgument("estimate_costs: need at least one secret");
  if (n_u > n || h > n) throw InvalidArgument("estimate_costs: n_u and h must be <= n");
  CostEstimate est;
  const long double cm = static_cast<long double>(model.c) * model.M;
  for (std::size_t k = 0; k <= h; ++k) {
    est.T_lwe += binomial_ld(n_u, k) * hypergeometric_tail(n, h, n_u, k);
  }
  est.T_lwe *= cm;

  std::vector<std::size_t> hist(h + 1, 0);
  for (std::size_t t = 0; t < num_secrets; ++t) {
    const Secret s = gen_secret(n, h, rng, h == 0);
    ++hist[window_weights(s, n_u).h1_u];
  }
  est.h1_tail.assign(h + 1, 0.0);
  std::size_t above = num_secrets;
  for (std::size_t k = 0; k <= h; ++k) {
    est.h1_tail[k] = static_cast<double>(above) / static_cast<double>(num_secrets);
    above -= hist[k];
  }
  const std::size_t cap = h * n_u / n;
  for (std::size_t k = 0; k <= cap; ++k) est.T_rlwe += binomial_ld(n_u, k) * est.h1_tail[k];
  est.T_rlwe *= cm * static_cast<long double>(n);
  est.ratio = est.T_lwe / est.T_rlwe;
  return est;
}

double TimeModel::predict(std::size_t n_u, std::size_t h_u) const {
  return b + a * static_cast<double>(candidate_count(n_u, h_u));
}

TimeModel fit_time_model(std::size_t n_u, std::span<const std::pair<std::size_t, double>> points) {
  if (points.size() < 2) throw InvalidArgument("fit_time_model: need at least two points");
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [hu, t] : points) {
    const long double x = candidate_count(n_u, hu);
    sx += x;
    sy += t;
    sxx += x * x;
    sxy += x * t;
  }
  const auto m = static_cast<long double>(points.size());
  const long double den = m * sxx - sx * sx;
  if (den == 0.0L) throw InvalidArgument("fit_time_model: observations share one h_u");
  TimeModel tm;
  tm.a = static_cast<double>((m * sxy - sx * sy) / den);
  tm.b = static_cast<double>((sy - static_cast<long double>(tm.a) * sx) / m);
  return tm;
}

}  // namespace slwe
