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
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "slwe/attack.hpp"
#include "slwe/enumerate.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace slwe {
namespace {

using testing::make_split;
using testing::SplitParams;

oracle::Big pascal(std::size_t n, std::size_t k) {
  std::vector<oracle::Big> row{1};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<oracle::Big> next(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = std::move(next);
  }
  return k <= n ? row[k] : oracle::Big(0);
}

TEST(Binomial, MatchesPascal) {
  for (std::size_t n : {0u, 1u, 7u, 40u, 66u, 67u, 100u}) {
    for (std::size_t k = 0; k <= n + 1; ++k) {
      const oracle::Big want = pascal(n, k);
      const std::uint64_t got = binomial(n, k);
      if (want > oracle::Big(std::numeric_limits<std::uint64_t>::max())) {
        EXPECT_EQ(got, std::numeric_limits<std::uint64_t>::max());
      } else {
        EXPECT_EQ(oracle::Big(got), want) << n << " " << k;
      }
      if (want == 0) {
        EXPECT_EQ(binomial_ld(n, k), 0.0L);
      } else {
        EXPECT_NEAR(binomial_ld(n, k) / want.convert_to<long double>(), 1.0L, 1e-15L)
            << n << " " << k;
      }
    }
  }
  EXPECT_EQ(binomial_sum(10, 2), 1u + 10u + 45u);
  EXPECT_EQ(binomial_sum(5, 9), 32u);
  EXPECT_EQ(binomial_sum(200, 100), std::numeric_limits<std::uint64_t>::max());
}

std::vector<std::vector<std::size_t>> colex_order(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> all;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> p;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1u) p.push_back(j);
    all.push_back(p);
  }
  // Colex order is the numeric order of the bitmask.
  return all;
}

TEST(Colex, RankUnrankNext) {
  for (std::size_t n : {1u, 5u, 10u}) {
    for (std::size_t k = 1; k <= n; ++k) {
      const auto want = colex_order(n, k);
      ASSERT_EQ(want.size(), binomial(n, k));
      std::vector<std::size_t> cur = want.front();
      for (std::uint64_t r = 0; r < want.size(); ++r) {
        EXPECT_EQ(colex_unrank(n, k, r), want[r]);
        EXPECT_EQ(colex_rank(want[r]), r);
        EXPECT_EQ(cur, want[r]);
        EXPECT_EQ(colex_next(cur, n), r + 1 < want.size());
      }
    }
  }
  EXPECT_THROW(colex_unrank(4, 2, 6), InvalidArgument);
  EXPECT_THROW(colex_unrank(2, 3, 0), InvalidArgument);
}

TEST(Enumerator, AscendingWeightEachPatternOnce) {
  CruelEnumerator e(9, 3);
  EXPECT_EQ(e.total(), 1u + 9u + 36u + 84u);
  std::vector<std::uint8_t> bits;
  std::set<std::vector<std::uint8_t>> seen;
  std::size_t last_weight = 0;
  std::uint64_t count = 0;
  while (e.next(bits)) {
    ASSERT_EQ(bits.size(), 9u);
    const auto w = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
    EXPECT_GE(w, last_weight);
    EXPECT_LE(w, 3u);
    last_weight = w;
    EXPECT_TRUE(seen.insert(bits).second);
    ++count;
  }
  EXPECT_EQ(count, e.total());
  EXPECT_FALSE(e.next(bits));
}

double naive_score(const IntMatrix& A, const IntVector& b, const std::vector<std::size_t>& cols,
                   const std::vector<std::uint8_t>& bits, std::size_t M, std::int64_t q) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < M; ++i) {
    oracle::Big r = -oracle::Big(b[i]);
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (bits[c]) r += A(i, cols[c]);
    const auto x = oracle::centered(r, q).convert_to<long double>();
    acc += x * x;
  }
  return static_cast<double>(acc / static_cast<long double>(M));
}

TEST(Scoring, BatchAndScannerMatchNaive) {
  Rng rng(21);
  const std::int64_t q = (std::int64_t{1} << 40) + 15;
  const Modulus mq(q);
  IntMatrix A(50, 12);
  IntVector b(50);
  for (auto& x : A.data()) x = rng.centered_residue(q);
  for (auto& x : b) x = rng.centered_residue(q);
  const std::vector<std::size_t> cruel{0, 2, 3, 5, 7, 8, 11};
  IntMatrix A_cruel = A.select_columns(cruel);

  std::vector<std::vector<std::uint8_t>> pats;
  CruelEnumerator e(cruel.size(), 3);
  std::vector<std::uint8_t> bits;
  while (e.next(bits)) pats.push_back(bits);
  const std::vector<double> batch = score_batch(pats, A_cruel, b, mq);
  for (std::size_t i = 0; i < pats.size(); ++i) {
    EXPECT_NEAR(batch[i] / naive_score(A_cruel, b, {0, 1, 2, 3, 4, 5, 6}, pats[i], 50, q), 1.0,
                1e-12);
  }

  const CruelScorer scorer(A, b, cruel, 40, mq);
  EXPECT_EQ(scorer.samples(), 40u);
  EXPECT_EQ(scorer.n_u(), 7u);
  for (std::size_t w = 0; w <= 3; ++w) {
    std::vector<std::vector<std::size_t>> seen;
    // Odd segment boundaries exercise restarts inside a block.
    for (std::uint64_t r0 = 0; r0 < binomial(7, w) || (w == 0 && r0 == 0); r0 += 4) {
      scorer.scan(w, r0, r0 + 4, [&](const std::vector<std::size_t>& pos, double s) {
        std::vector<std::uint8_t> pb(7, 0);
        for (std::size_t p : pos) pb[p] = 1;
        EXPECT_NEAR(s / naive_score(A, b, cruel, pb, 40, q), 1.0, 1e-12);
        EXPECT_NEAR(s / scorer.score(pos), 1.0, 1e-12);
        seen.push_back(pos);
      });
      if (w == 0) break;
    }
    ASSERT_EQ(seen.size(), binomial(7, w));
    for (std::size_t r = 0; r < seen.size(); ++r) EXPECT_EQ(colex_rank(seen[r]), r);
  }
  EXPECT_THROW(CruelScorer(A, b, std::vector<std::size_t>{12}, 10, mq), InvalidArgument);
}

TEST(Greedy, RecoversCoolBitsAndFollowsOrder) {
  Rng rng(22);
  SplitParams sp{10, 40, 2, 6, 1 << 16, 0.15 * 18918.6, 0.05 * 18918.6, 4000, 64};
  auto f = make_split(sp, rng);
  Secret start = f.secret;
  for (std::size_t j : f.data.cool) start.bits[j] = static_cast<std::uint8_t>(rng.below(2));
  EXPECT_EQ(greedy_cool(start, f.data, 0), f.secret);

  // Only indices in the order may change.
  const std::vector<std::size_t> order{f.data.cool.front()};
  const Secret partial =
      greedy_cool(start, f.data.A, f.data.b, order, 0, Modulus(f.data.q));
  for (std::size_t j = 0; j < start.size(); ++j) {
    if (j != order.front()) {
      EXPECT_EQ(partial.bits[j], start.bits[j]);
    }
  }

  // A zero column ties; the bit is set to 0.
  IntMatrix Z(40, 2);
  IntVector zb(40);
  for (std::size_t i = 0; i < 40; ++i) Z(i, 0) = static_cast<std::int64_t>(i);
  Secret ones;
  ones.bits = {0, 1};
  const std::vector<std::size_t> both{0, 1};
  const Secret tie = greedy_cool(ones, Z, zb, both, 0, Modulus(97));
  EXPECT_EQ(tie.bits, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_THROW(greedy_cool(ones, Z, zb, std::vector<std::size_t>{2}, 0, Modulus(97)),
               InvalidArgument);
}

TEST(Greedy, SuccessRateOnSyntheticSplit) {
  const double su = 65536.0 / std::sqrt(12.0);
  Rng rng(23);
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    SplitParams sp{8, 40, 2, 8, 1 << 16, 0.15 * su, 0.3 * su, 20000, 64};
    auto f = make_split(sp, rng);
    Secret start = f.secret;
    for (std::size_t j : f.data.cool) start.bits[j] = 0;
    ok += greedy_cool(start, f.data, 0) == f.secret;
  }
  EXPECT_GE(ok, 19);
}

TEST(Attack, RecoversAndIsIndependentOfJobs) {
  const double su = 65536.0 / std::sqrt(12.0);
  Rng rng(24);
  SplitParams sp{20, 30, 3, 4, 1 << 16, 0.1 * su, 0.05 * su, 3000, 64};
  auto f = make_split(sp, rng);
  SearchConfig cfg;
  cfg.eval_interval = 256;
  cfg.batch_size = 64;
  cfg.top_k = 8;
  TestConfig test;
  nlohmann::json first;
  for (std::size_t jobs : {1u, 3u}) {
    cfg.jobs = jobs;
    const AttackReport r = run_attack(f.data, f.A_orig, f.b_orig, cfg, test);
    ASSERT_TRUE(r.recovered);
    EXPECT_EQ(*r.recovered, f.secret);
    EXPECT_EQ(r.h_u_found, 3u);
    EXPECT_FALSE(r.window);
    EXPECT_GE(r.candidates_scored, binomial_sum(20, 2));
    EXPECT_LE(r.candidates_scored, binomial_sum(20, 3));
    nlohmann::json j = r;
    j.erase("timings");
    if (jobs == 1) {
      first = j;
    } else {
      EXPECT_EQ(j, first);
    }
  }
}

TEST(Attack, StopsAtMaxWeight) {
  const double su = 65536.0 / std::sqrt(12.0);
  Rng rng(25);
  SplitParams sp{12, 20, 4, 2, 1 << 16, 0.1 * su, 0.05 * su, 2000, 64};
  auto f = make_split(sp, rng);
  SearchConfig cfg;
  cfg.max_weight = 3;
  cfg.eval_interval = 100;
  cfg.batch_size = 10;
  const AttackReport r = run_attack(f.data, f.A_orig, f.b_orig, cfg, TestConfig{});
  EXPECT_FALSE(r.recovered);
  EXPECT_EQ(r.candidates_scored, binomial_sum(12, 3));
  const nlohmann::json j = r;
  EXPECT_FALSE(j["recovered"].get<bool>());
  EXPECT_TRUE(j["secret"].is_null());
}

TEST(Attack, SampleCounts) {
  const double su = 65536.0 / std::sqrt(12.0);
  Rng rng(26);
  SplitParams sp{6, 10, 1, 1, 1 << 16, 0.1 * su, 0.05 * su, 500, 16};
  auto f = make_split(sp, rng);
  SearchConfig cfg;
  TestConfig test;
  const double v = 2.0 * f.data.sigma_r * f.data.sigma_r + f.data.error_variance;
  const std::uint64_t want = min_samples(test.alpha, test.beta, v, Modulus(1 << 16));
  EXPECT_EQ(bruteforce_samples(f.data, cfg, test), std::clamp<std::uint64_t>(want, 30, 500));
  cfg.M_bruteforce = 77;
  EXPECT_EQ(bruteforce_samples(f.data, cfg, test), 77u);
  cfg.M_bruteforce = 10000;
  EXPECT_EQ(bruteforce_samples(f.data, cfg, test), 500u);
  f.data.sigma_r = 10.0 * su;
  cfg.M_bruteforce = 0;
  EXPECT_EQ(bruteforce_samples(f.data, cfg, test), 500u);
}

TEST(SearchConfig, ValidationAndJson) {
  SearchConfig c;
  c.validate();
  c.top_k = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SearchConfig{};
  c.eval_interval = 10;
  c.batch_size = 20;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SearchConfig{};
  c.jobs = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SearchConfig{};
  c.max_weight = 6;
  c.M_greedy = 123;
  const nlohmann::json j = c;
  const auto back = j.get<SearchConfig>();
  EXPECT_EQ(back.max_weight, 6u);
  EXPECT_EQ(back.M_greedy, 123u);
}

TEST(PrepareAttackData, PoolsAndDerivesErrorVariance) {
  ReducedDataset a;
  a.A_red = IntMatrix{{1, 2, 3}, {4, 5, 6}};
  a.b_red = {7, 8};
  a.R = IntMatrix{{1, 0}, {1, 1}};
  ReducedDataset b = a;
  b.R = IntMatrix{{2, 0}, {0, 0}};
  ColumnProfile p;
  p.stdevs = {10.0, 1.0, 1.0};
  p.cruel_columns = {0};
  p.cool_columns = {1, 2};
  p.n_u = 1;
  p.n_r = 2;
  p.sigma_r_measured = 1.5;
  LweParams params;
  params.n = 3;
  params.q = 97;
  params.h = 2;
  params.sigma_e = 2.0;
  const std::vector<ReducedDataset> ds{a, b};
  const AttackData d = prepare_attack_data(ds, p, params);
  EXPECT_EQ(d.A.rows(), 4u);
  EXPECT_EQ(d.b.size(), 4u);
  EXPECT_EQ(d.cruel, p.cruel_columns);
  EXPECT_EQ(d.cool, p.cool_columns);
  EXPECT_DOUBLE_EQ(d.sigma_r, 1.5);
  // Squared row norms 1, 2, 4, 0.
  EXPECT_DOUBLE_EQ(d.error_variance, 4.0 * 7.0 / 4.0);
  p.stdevs.push_back(1.0);
  EXPECT_THROW(prepare_attack_data(ds, p, params), InvalidArgument);
}

}  // namespace
}  // namespace slwe
