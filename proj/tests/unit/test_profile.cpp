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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "slwe/profile.hpp"
#include "slwe/reduction.hpp"

namespace slwe {
namespace {

LweInstance make_instance(std::size_t n, std::int64_t q, std::size_t h, std::uint64_t seed) {
  Rng rng(seed);
  LweParams p;
  p.n = n;
  p.q = q;
  p.h = h;
  const Secret s = gen_secret(n, h, rng);
  return gen_lwe(p, s, rng);
}

// Columns [0, n_u) uniform, the rest rounded Gaussians of stdev ratio * sigma_u.
IntMatrix split_matrix(std::size_t rows, std::size_t n, std::size_t n_u, double ratio,
                       std::int64_t q, Rng& rng) {
  const double sd = ratio * q / std::sqrt(12.0);
  IntMatrix m(rows, n);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = j < n_u ? rng.centered_residue(q)
                        : center(static_cast<std::int64_t>(std::llround(sd * rng.normal())), q);
    }
  return m;
}

TEST(Profile, UnreducedDataIsAllCruel) {
  const LweInstance inst = make_instance(32, 4096, 4, 1);
  const ColumnProfile p = profile(inst.A, Modulus(4096));
  EXPECT_EQ(p.n_u, 32u);
  EXPECT_EQ(p.n_r, 0u);
  EXPECT_FALSE(p.sigma_r_measured.has_value());
  EXPECT_FALSE(p.sigma_r_predicted.has_value());
  EXPECT_NEAR(p.rho, 1.0, 0.05);
}

TEST(Profile, ThresholdIsHalfUniformStdev) {
  const Modulus q(4096);
  const double sigma_u = q.uniform_stdev();
  IntMatrix m(2, 3);
  // Two-row columns {-x, x} have sample stdev x sqrt(2).
  const double xs[] = {0.49 * sigma_u / std::sqrt(2.0), 0.51 * sigma_u / std::sqrt(2.0), 0.0};
  for (std::size_t j = 0; j < 3; ++j) {
    const auto x = static_cast<std::int64_t>(std::llround(xs[j]));
    m(0, j) = -x;
    m(1, j) = x;
  }
  const ColumnProfile p = profile(m, q);
  EXPECT_EQ(p.cruel_columns, (std::vector<std::size_t>{1}));
  EXPECT_EQ(p.cool_columns, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(profile(m, q, 0.1).n_u, 2u);
  EXPECT_THROW(profile(m, q, 0.0), InvalidArgument);
}

TEST(Profile, SharpSplitMatchesPrediction) {
  Rng rng(2);
  const std::int64_t q = 1 << 20;
  const IntMatrix m = split_matrix(4000, 64, 24, 0.2, q, rng);
  const ColumnProfile p = profile(m, Modulus(q));
  EXPECT_EQ(p.n_u, 24u);
  EXPECT_EQ(p.n_u + p.n_r, 64u);
  ASSERT_TRUE(p.sigma_r_measured && p.sigma_r_predicted);
  EXPECT_LE(*p.sigma_r_measured, p.sigma_u);
  EXPECT_NEAR(*p.sigma_r_measured / p.sigma_u, 0.2, 0.01);
  EXPECT_NEAR(*p.sigma_r_predicted / *p.sigma_r_measured, 1.0, 0.15);
  EXPECT_LT(variance_identity(p).relative_gap, 0.1);
}

TEST(Profile, ReferenceSigmaRRatios) {
  EXPECT_NEAR(*predict_sigma_r_ratio(0.769, 256, 143), 0.27, 0.01);
  EXPECT_NEAR(*predict_sigma_r_ratio(0.677, 512, 228), 0.15, 0.01);
  EXPECT_NEAR(*predict_sigma_r_ratio(0.413, 512, 75), 0.17, 0.01);
  EXPECT_NEAR(*predict_sigma_r_ratio(0.710, 768, 373), 0.19, 0.01);
  EXPECT_FALSE(predict_sigma_r_ratio(0.5, 64, 64).has_value());
  EXPECT_FALSE(predict_sigma_r_ratio(0.1, 64, 30).has_value());
}

TEST(NuRho, Examples) {
  ColumnProfile p;
  p.stdevs.assign(64, 1.0);
  p.n_u = 64;
  const NuRhoReport unreduced = check_nu_rho(p, 1.0, 64);
  EXPECT_DOUBLE_EQ(unreduced.rho2n, 64.0);
  EXPECT_DOUBLE_EQ(unreduced.gap, 0.0);
  p.n_u = 143;
  const NuRhoReport row1 = check_nu_rho(p, 0.769, 256);
  EXPECT_NEAR(row1.rho2n, 151.3, 0.15);
  EXPECT_NEAR(row1.gap, 0.032, 0.001);
  p.n_u = 373;
  EXPECT_NEAR(check_nu_rho(p, 0.710, 768).rho2n, 387.1, 0.15);
}

class ReducedFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    inst_ = new LweInstance(make_instance(64, 256, 4, 1));
    std::vector<ReducedDataset> ds;
    for (const auto& it : dataset_factory(*inst_, ReductionConfig{}, 4, 1, 1)) {
      ds.push_back(*it.dataset);
    }
    datasets_ = new std::vector<ReducedDataset>(std::move(ds));
  }
  static void TearDownTestSuite() {
    delete inst_;
    delete datasets_;
  }
  static LweInstance* inst_;
  static std::vector<ReducedDataset>* datasets_;
};

LweInstance* ReducedFixture::inst_ = nullptr;
std::vector<ReducedDataset>* ReducedFixture::datasets_ = nullptr;

TEST_F(ReducedFixture, CruelColumnsConcentrateAtTheFront) {
  const SamplePool pool = pool_samples(*datasets_);
  const ColumnProfile p = profile(pool.A, Modulus(256));
  ASSERT_GT(p.n_u, 0u);
  ASSERT_LT(p.n_u, 64u);
  std::size_t in_prefix = 0;
  for (std::size_t c : p.cruel_columns) in_prefix += c < p.n_u;
  EXPECT_GE(in_prefix, static_cast<std::size_t>(0.85 * static_cast<double>(p.n_u)));
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < 64; ++j) (j < p.n_u ? head : tail) += p.stdevs[j];
  EXPECT_GT(head / static_cast<double>(p.n_u), 2.0 * tail / static_cast<double>(64 - p.n_u));
  EXPECT_LE(check_nu_rho(p, p.rho, 64).gap, 0.1);
}

TEST_F(ReducedFixture, ErrorRatioMatchesTransformedError) {
  const ReducedDataset& ds = datasets_->front();
  const Modulus q(256);
  const IntVector Re = mat_vec_mod(ds.expanded_R(), *inst_->error, q);
  double s = 0.0;
  double s2 = 0.0;
  for (std::int64_t x : Re) {
    s += static_cast<double>(x);
    s2 += static_cast<double>(x) * static_cast<double>(x);
  }
  const double m = static_cast<double>(Re.size());
  const double sd = std::sqrt((s2 - s * s / m) / (m - 1.0));
  const double ratio = estimate_sigma_e(ds.A_red, ds.b_red, *inst_->secret, q);
  EXPECT_NEAR(ratio / (sd / q.uniform_stdev()), 1.0, 1e-9);
}

TEST_F(ReducedFixture, GramSchmidtProfileShape) {
  const LweInstance& inst = *inst_;
  Rng rng = Rng::derive(1, 0);
  const Subsample s = subsample(inst, 56, rng);
  const Embedding e = embed(s.A, Modulus(256), 10);
  const std::vector<double> before = gs_profile(e.basis);
  const std::vector<double> after = gs_profile(interleaved_reduce(e, ReductionConfig{}).basis);
  ASSERT_EQ(after.size(), 120u);
  const std::size_t decile = after.size() / 10;
  const double first = *std::max_element(after.begin(), after.begin() + decile);
  const double last = *std::max_element(after.end() - decile, after.end());
  // Unreduced q-vectors stay at the front; the tail flattens well below ln q.
  EXPECT_NEAR(first, std::log(256.0), 0.05);
  EXPECT_LT(last, std::log(256.0) - 1.0);
  EXPECT_GT(last, 0.0);
  double log_det_before = 0.0;
  double log_det_after = 0.0;
  for (double x : before) log_det_before += x;
  for (double x : after) log_det_after += x;
  EXPECT_NEAR(log_det_before, log_det_after, 1e-6 * log_det_before);
}

TEST(GsProfile, Examples) {
  IntMatrix diag(4, 4);
  for (std::size_t i = 0; i < 4; ++i) diag(i, i) = 97;
  for (double x : gs_profile(diag)) EXPECT_NEAR(x, std::log(97.0), 1e-12);
  const LweInstance inst = make_instance(8, 97, 2, 3);
  Rng rng(3);
  const Embedding e = embed(subsample(inst, 7, rng).A, Modulus(97), 5);
  const std::vector<double> g = gs_profile(e.basis);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(g[i], std::log(97.0), 1e-9);
  for (std::size_t i = 8; i < 15; ++i) EXPECT_NEAR(g[i], std::log(5.0), 1e-9);
  EXPECT_THROW(gs_profile(IntMatrix{{1, 2}, {2, 4}}), InvalidArgument);
}

TEST(SigmaE, IdentityTransformIsUnmagnifiedError) {
  Rng rng(4);
  LweParams p;
  p.n = 16;
  p.q = 4096;
  p.h = 3;
  p.m_total = 4000;
  const Secret s = gen_secret(16, 3, rng);
  const LweInstance inst = gen_lwe(p, s, rng);
  const double ratio = estimate_sigma_e(inst.A, inst.b, s, Modulus(4096));
  EXPECT_NEAR(ratio / (std::sqrt(12.0) * 3.0 / 4096.0), 1.0, 0.05);
}

TEST(ProfileReport, JsonAndCsv) {
  Rng rng(5);
  const IntMatrix m = split_matrix(200, 6, 2, 0.1, 4096, rng);
  const ColumnProfile p = profile(m, Modulus(4096));
  const nlohmann::json j = p;
  EXPECT_EQ(j["n_u"], 2);
  EXPECT_EQ(j["stdevs"].size(), 6u);
  EXPECT_TRUE(j.contains("nu_rho_gap"));
  std::ostringstream csv;
  write_profile_csv(csv, p);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "column,stdev,ratio,cruel");
  int rows = 0;
  int cruel = 0;
  while (std::getline(lines, line)) {
    ++rows;
    cruel += line.back() == '1';
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(cruel, 2);
}

}  // namespace
}  // namespace slwe
