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

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "slwe/matrix_io.hpp"
#include "slwe/modmath.hpp"
#include "slwe/rng.hpp"
#include "support/oracles.hpp"

namespace slwe {
namespace {

IntMatrix random_matrix(std::size_t r, std::size_t c, std::int64_t q, Rng& rng) {
  IntMatrix m(r, c);
  for (auto& x : m.data()) x = rng.centered_residue(q);
  return m;
}

TEST(Center, Examples) {
  EXPECT_EQ(center(0, 12), 0);
  EXPECT_EQ(center(11, 12), -1);
  EXPECT_EQ(center(6, 12), 6);
  EXPECT_EQ(center(-6, 12), 6);
  EXPECT_EQ(center(-7, 12), 5);
  EXPECT_EQ(center(7, 13), -6);
}

TEST(Center, IdempotentAndCongruent) {
  for (std::int64_t q : {3, 4, 12, 13, 3329, 4096}) {
    for (std::int64_t x = -3 * q; x <= 3 * q; ++x) {
      const std::int64_t c = center(x, q);
      EXPECT_EQ(center(c, q), c);
      EXPECT_EQ(((x - c) % q + q) % q, 0);
      EXPECT_GT(2 * c, -q);
      EXPECT_LE(2 * c, q);
    }
  }
}

TEST(Center, WideAccumulatorMatchesNarrow) {
  const Modulus q(3329);
  for (std::int64_t x = -10000; x <= 10000; x += 7) {
    EXPECT_EQ(q.center(static_cast<i128>(x)), q.center(x));
  }
  const i128 big = static_cast<i128>(1) << 100;
  const auto expect = oracle::centered(oracle::Big(1) << 100, 3329).convert_to<std::int64_t>();
  EXPECT_EQ(q.center(big), expect);
}

TEST(ModulusTest, Bounds) {
  EXPECT_THROW(Modulus(2), InvalidArgument);
  EXPECT_THROW(Modulus(0), InvalidArgument);
  EXPECT_NO_THROW(Modulus(3));
  EXPECT_NO_THROW(Modulus{kMaxModulus});
  EXPECT_THROW(Modulus(kMaxModulus + 1), InvalidArgument);
  EXPECT_NEAR(Modulus(4096).uniform_stdev(), 1182.41, 0.01);
}

TEST(MatMulMod, IdentityCentersInput) {
  const Modulus q(12);
  const IntMatrix a{{13, -7}, {6, 25}};
  const IntMatrix expect{{1, 5}, {6, 1}};
  EXPECT_EQ(mat_mul_mod(IntMatrix::identity(2), a, q), expect);
}

TEST(MatMulMod, OneByOne) {
  EXPECT_EQ(mat_mul_mod(IntMatrix{{7}}, IntMatrix{{9}}, Modulus(12)), (IntMatrix{{3}}));
}

TEST(MatMulMod, MatchesSchoolbookOracle) {
  Rng rng(11);
  for (std::int64_t qv : {std::int64_t{3329}, std::int64_t{1} << 28, kMaxModulus}) {
    const Modulus q(qv);
    for (int trial = 0; trial < 20; ++trial) {
      const IntMatrix x = random_matrix(8, 8, qv, rng);
      const IntMatrix y = random_matrix(8, 8, qv, rng);
      const IntMatrix got = mat_mul_mod(x, y, q);
      const auto want = oracle::schoolbook_mul_mod(x, y, qv);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) ASSERT_EQ(oracle::Big(got(i, j)), want[i][j]);
    }
  }
}

TEST(MatMulMod, HeadroomAtLargestModulus) {
  // 300 products of (q/2)^2 with q = 2^41 overflow 64 bits many times over.
  const std::int64_t half = kMaxModulus / 2;
  IntMatrix x(1, 300);
  IntMatrix y(300, 1);
  for (std::size_t k = 0; k < 300; ++k) {
    x(0, k) = half;
    y(k, 0) = half - static_cast<std::int64_t>(k);
  }
  const auto want = oracle::schoolbook_mul_mod(x, y, kMaxModulus);
  EXPECT_EQ(oracle::Big(mat_mul_mod(x, y, Modulus(kMaxModulus))(0, 0)), want[0][0]);
}

TEST(MatMulMod, DimensionMismatch) {
  EXPECT_THROW(mat_mul_mod(IntMatrix(2, 3), IntMatrix(2, 3), Modulus(5)), InvalidArgument);
  EXPECT_THROW(mat_vec_mod(IntMatrix(2, 3), IntVector(2), Modulus(5)), InvalidArgument);
}

TEST(MatMul, ExactAndOverflowChecked) {
  const IntMatrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(mat_mul(a, a), (IntMatrix{{7, 10}, {15, 22}}));
  const std::int64_t big = std::int64_t{1} << 40;
  EXPECT_THROW(mat_mul(IntMatrix{{big}}, IntMatrix{{big}}), std::overflow_error);
}

TEST(IntMatrixTest, Construction) {
  EXPECT_THROW(IntMatrix(2, 2, std::vector<std::int64_t>(3)), InvalidArgument);
  EXPECT_THROW((IntMatrix{{1, 2}, {3}}), InvalidArgument);
  const IntMatrix a{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(a.transpose(), (IntMatrix{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_EQ(a.block(0, 2, 1, 3), (IntMatrix{{2, 3}, {5, 6}}));
  const std::size_t rows[] = {1, 1};
  EXPECT_EQ(a.select_rows(rows), (IntMatrix{{4, 5, 6}, {4, 5, 6}}));
  const std::size_t cols[] = {2, 0};
  EXPECT_EQ(a.select_columns(cols), (IntMatrix{{3, 1}, {6, 4}}));
  EXPECT_EQ(dot(a.row(0), a.row(1)), 32);
}

TEST(ColumnStdev, Examples) {
  const Modulus q(97);
  for (double s : column_stdev(IntMatrix(5, 3), q)) EXPECT_EQ(s, 0.0);
  const auto two = column_stdev(IntMatrix{{-1}, {1}}, q);
  EXPECT_DOUBLE_EQ(two[0], std::sqrt(2.0));
  EXPECT_THROW(column_stdev(IntMatrix(1, 3), q), InvalidArgument);
}

TEST(ColumnStdev, UniformMonteCarlo) {
  Rng rng(2024);
  const Modulus q(4096);
  const IntMatrix m = random_matrix(10000, 4, 4096, rng);
  for (double s : column_stdev(m, q)) EXPECT_NEAR(s / q.uniform_stdev(), 1.0, 0.03);
}

TEST(RngTest, SeedReproducesStream) {
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
  Rng c = Rng::derive(99, 1);
  Rng d = Rng::derive(99, 2);
  EXPECT_NE(c.next(), d.next());
}

TEST(RngTest, EngineIsStandardMt19937_64) {
  // First output for the standard default seed is fixed by the C++ standard.
  Rng r(5489);
  EXPECT_EQ(r.next(), 14514284786278117030ULL);
}

TEST(RngTest, DerivedDrawsInRange) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(rng.below(7), 7u);
    const double u = rng.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const std::int64_t c = rng.centered_residue(12);
    EXPECT_GT(c, -6);
    EXPECT_LE(c, 6);
  }
}

TEST(RngTest, NormalMoments) {
  Rng rng(8);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(MatrixIo, RoundTripCenters) {
  std::stringstream ss;
  const IntMatrix m{{0, 11, 6}, {-13, 5, 24}};
  write_matrix(ss, m, 12);
  EXPECT_EQ(ss.str(), "2 3 12\n0 -1 6\n-1 5 0\n");
  const MatrixFile f = read_matrix(ss);
  EXPECT_EQ(f.q, 12);
  EXPECT_EQ(f.matrix, (IntMatrix{{0, -1, 6}, {-1, 5, 0}}));
}

TEST(MatrixIo, RawResiduesAndExactMatrices) {
  std::stringstream raw("1 3 12\n11 7 12\n");
  EXPECT_EQ(read_matrix(raw).matrix, (IntMatrix{{-1, -5, 0}}));
  std::stringstream exact;
  write_matrix(exact, IntMatrix{{-100, 250}}, 0);
  EXPECT_EQ(read_matrix(exact).matrix, (IntMatrix{{-100, 250}}));
}

TEST(MatrixIo, MalformedInput) {
  std::stringstream bad_header("2 x 12\n");
  EXPECT_THROW(read_matrix(bad_header), std::runtime_error);
  std::stringstream truncated("2 2 12\n1 2 3\n");
  EXPECT_THROW(read_matrix(truncated), std::runtime_error);
  std::stringstream bad_q("1 1 2\n1\n");
  EXPECT_THROW(read_matrix(bad_q), InvalidArgument);
}

}  // namespace
}  // namespace slwe
