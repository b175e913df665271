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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "slwe/reduction.hpp"

namespace slwe {
namespace {

using real = long double;

constexpr double kLovaszSlack = 1e-9;
constexpr double kSizeSlack = 1e-9;
constexpr real kTinyNorm = 1e-30L;
// Size reduction with coefficients below this bound leaves mu accurate enough
// to skip recomputing the row from the Gram matrix.
constexpr double kExactCoeffBound = 67108864.0;  // 2^26

// Diagonal Gram entries below this bound keep every entry and every update
// term of an int64 Gram matrix in range (Cauchy-Schwarz).
constexpr i128 kNarrowGramBound = i128{1} << 62;

struct NarrowOverflow {};

std::int64_t checked(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("lll_reduce: basis entry exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

template <typename G>
class Lll {
  static constexpr bool kNarrow = std::is_same_v<G, std::int64_t>;

 public:
  Lll(const IntMatrix& basis, double delta, LllStats* stats)
      : b_(basis), d_(basis.rows()), delta_(delta), stats_(stats) {
    gram_.assign(d_ * d_, 0);
    for (std::size_t i = 0; i < d_; ++i) {
      if constexpr (kNarrow) {
        if (dot(b_.row(i), b_.row(i)) >= kNarrowGramBound) throw NarrowOverflow{};
      }
      for (std::size_t j = 0; j <= i; ++j) {
        const auto g = static_cast<G>(dot(b_.row(i), b_.row(j)));
        gram_[i * d_ + j] = g;
        gram_[j * d_ + i] = g;
      }
    }
    mu_.assign(d_ * d_, 0.0);
    r_.assign(d_ * d_, 0.0);
    bsq_.assign(d_, 0.0);
  }

  IntMatrix run() {
    if (d_ == 0) return b_;
    std::size_t start = 1;
    for (int pass = 0; pass < 8; ++pass) {
        gso_row(0);
      for (std::size_t k = 1; k < start && k < d_; ++k) gso_row(k);
      main_loop(start);
      const std::size_t bad = first_violation();
      if (bad == d_) return b_;
      if (stats_) ++stats_->restarts;
      start = std::max<std::size_t>(bad, 1);
    }
    throw std::runtime_error("lll_reduce: floating-point Gram-Schmidt failed to converge");
  }

 private:
  G& g(std::size_t i, std::size_t j) { return gram_[i * d_ + j]; }
  real& mu(std::size_t i, std::size_t j) { return mu_[i * d_ + j]; }
  real& r(std::size_t i, std::size_t j) { return r_[i * d_ + j]; }

  void gso_row(std::size_t k) {
    gso_mu(k);
    gso_norm(k);
  }

  void gso_mu(std::size_t k) {
    if (g(k, k) == 0) throw InvalidArgument("lll_reduce: basis rows are linearly dependent");
    for (std::size_t j = 0; j < k; ++j) {
      real acc = static_cast<real>(g(k, j));
      for (std::size_t i = 0; i < j; ++i) acc -= mu(j, i) * r(k, i);
      r(k, j) = acc;
      mu(k, j) = acc / bsq_[j];
    }
  }

  // A legitimately tiny b*_k can round to a non-positive value mid-run; the
  // clamp makes the Lovasz test fail so the row is swapped towards the front.
  void gso_norm(std::size_t k) {
    const real gkk = static_cast<real>(g(k, k));
    real acc = gkk;
    for (std::size_t j = 0; j < k; ++j) acc -= mu(k, j) * r(k, j);
    bsq_[k] = std::max(acc, gkk * kTinyNorm);
  }

  // b_k <- b_k - c b_j, keeping the Gram matrix exact.
  void row_sub(std::size_t k, std::size_t j, std::int64_t c) {
    auto bk = b_.row(k);
    auto bj = b_.row(j);
    if constexpr (kNarrow) {
      const i128 ci = c;
      const i128 cc = ci * ci * g(j, j);
      const i128 gkk = g(k, k) - 2 * ci * g(k, j) + cc;
      if (cc >= kNarrowGramBound || gkk >= kNarrowGramBound) throw NarrowOverflow{};
      for (std::size_t t = 0; t < bk.size(); ++t) bk[t] -= c * bj[t];
      for (std::size_t i = 0; i < d_; ++i) g(k, i) -= c * g(j, i);
      g(k, k) = static_cast<G>(gkk);
    } else {
      for (std::size_t t = 0; t < bk.size(); ++t) {
        bk[t] = checked(static_cast<i128>(bk[t]) - static_cast<i128>(c) * bj[t]);
      }
      const i128 ci = c;
      const i128 gkk = g(k, k) - 2 * ci * g(k, j) + ci * ci * g(j, j);
      for (std::size_t i = 0; i < d_; ++i) g(k, i) -= ci * g(j, i);
      g(k, k) = gkk;
    }
    for (std::size_t i = 0; i < d_; ++i) g(i, k) = g(k, i);
    if (stats_) ++stats_->size_reductions;
  }

  void size_reduce(std::size_t k) {
    for (int iter = 0; iter < 64; ++iter) {
      gso_mu(k);
      real max_mu = 0.0;
      for (std::size_t j = 0; j < k; ++j) max_mu = std::max(max_mu, std::fabs(mu(k, j)));
      if (max_mu <= 0.5 + kSizeSlack) {
        gso_norm(k);
        return;
      }
      for (std::size_t j = k; j-- > 0;) {
        const real m = mu(k, j);
        if (std::fabs(m) <= 0.5) continue;
        const real cd = std::nearbyint(m);
        const auto c = static_cast<std::int64_t>(cd);
        row_sub(k, j, c);
        for (std::size_t i = 0; i < j; ++i) mu(k, i) -= cd * mu(j, i);
        mu(k, j) -= cd;
      }
      if (max_mu < kExactCoeffBound) {
        for (std::size_t j = 0; j < k; ++j) r(k, j) = mu(k, j) * bsq_[j];
        gso_norm(k);
        return;
      }
    }
    throw std::runtime_error("lll_reduce: size reduction did not converge");
  }

  void swap_rows(std::size_t k) {
    auto a = b_.row(k - 1);
    auto c = b_.row(k);
    std::swap_ranges(a.begin(), a.end(), c.begin());
    for (std::size_t i = 0; i < d_; ++i) std::swap(g(k - 1, i), g(k, i));
    for (std::size_t i = 0; i < d_; ++i) std::swap(g(i, k - 1), g(i, k));
    if (stats_) ++stats_->swaps;
  }

  bool lovasz_holds(std::size_t k) {
    const real m = mu(k, k - 1);
    return bsq_[k] + m * m * bsq_[k - 1] >= delta_ * bsq_[k - 1] * (1.0 - kLovaszSlack);
  }

  void main_loop(std::size_t k) {
    while (k < d_) {
      size_reduce(k);
      if (lovasz_holds(k)) {
        ++k;
        continue;
      }
      swap_rows(k);
      if (k == 1) {
        gso_row(0);
      } else {
        --k;
      }
    }
  }

  // Recomputes the whole Gram-Schmidt data and returns the first index that
  // fails size reduction or the Lovasz test, or d_ if none does.
  std::size_t first_violation() {
    for (std::size_t k = 0; k < d_; ++k) {
      gso_row(k);
      for (std::size_t j = 0; j < k; ++j) {
        if (std::fabs(mu(k, j)) > 0.5 + 1e-6) return k;
      }
      if (k > 0 && !lovasz_holds(k)) return k;
    }
    return d_;
  }

  IntMatrix b_;
  std::size_t d_;
  real delta_;
  LllStats* stats_;
  std::vector<G> gram_;
  std::vector<real> mu_;
  std::vector<real> r_;
  std::vector<real> bsq_;
};

}  // namespace

IntMatrix lll_reduce(const IntMatrix& basis, double delta, LllStats* stats) {
  if (!(delta > 0.25 && delta < 1.0)) {
    throw InvalidArgument("lll_reduce: delta must lie in (0.25, 1)");
  }
  LllStats narrow_stats = stats ? *stats : LllStats{};
  try {
    IntMatrix out = Lll<std::int64_t>(basis, delta, stats ? &narrow_stats : nullptr).run();
    if (stats) *stats = narrow_stats;
    return out;
  } catch (const NarrowOverflow&) {
  }
  return Lll<i128>(basis, delta, stats).run();
}

}  // namespace slwe
