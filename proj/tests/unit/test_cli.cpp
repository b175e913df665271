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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "slwe/cli.hpp"
#include "slwe/matrix_io.hpp"
#include "support/temp_dir.hpp"

namespace slwe::cli {
namespace {

using nlohmann::json;
using slwe::testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

TEST(ParseReal, Forms) {
  EXPECT_DOUBLE_EQ(parse_real("1e-5"), 1e-5);
  EXPECT_DOUBLE_EQ(parse_real("2^-128"), std::ldexp(1.0, -128));
  EXPECT_DOUBLE_EQ(parse_real("10^3"), 1000.0);
  EXPECT_DOUBLE_EQ(parse_real("0.25"), 0.25);
  EXPECT_THROW(parse_real("abc"), InvalidArgument);
  EXPECT_THROW(parse_real("2^"), InvalidArgument);
  EXPECT_THROW(parse_real("1e-5x"), InvalidArgument);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, kExitUsage);
  EXPECT_EQ(call({"--help"}).code, kExitOk);
  EXPECT_EQ(call({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "16"}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "16", "--h", "2", "--out", "x", "--bogus"}).code, kExitUsage);
  TempDir tmp;
  const std::string out = (tmp / "i").string();
  EXPECT_EQ(call({"gen", "--n", "16", "--logq", "50", "--h", "2", "--out", out}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "16", "--logq", "10", "--h", "20", "--out", out}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "12", "--logq", "10", "--h", "2", "--rlwe", "--out", out}).code,
            kExitUsage);
  const Result missing = call({"reduce", "--instance", (tmp / "none").string(), "--out", out});
  EXPECT_EQ(missing.code, kExitRuntime);
  EXPECT_NE(missing.err.find("error:"), std::string::npos);
  EXPECT_EQ(call({"estimate", "--n", "100", "--logq", "12", "--h", "5"}).code, kExitUsage);
}

TEST(Cli, EndToEndRecovery) {
  TempDir tmp;
  const std::string inst = (tmp / "inst").string();
  const std::string ds = (tmp / "ds").string();
  const std::string prof = (tmp / "prof").string();
  const std::string rep = (tmp / "rep").string();
  ASSERT_EQ(call({"gen", "--n", "32", "--logq", "12", "--h", "3", "--seed", "5", "--with-truth",
                  "--out", inst})
                .code,
            kExitOk);
  EXPECT_TRUE(std::filesystem::exists(tmp / "inst" / "secret.mat"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "inst" / "run.json"));

  const Result red = call({"reduce", "--instance", inst, "--out", ds, "--count", "2", "--seed",
                           "9"});
  ASSERT_EQ(red.code, kExitOk) << red.err;
  EXPECT_EQ(json::parse(red.out)["count"], 2);
  EXPECT_EQ(read_json(tmp / "ds" / "index.json")["datasets"].size(), 2u);
  EXPECT_EQ(read_json(tmp / "ds" / "run.json")["args"][0], "reduce");

  const std::string csv = (tmp / "prof" / "cols.csv").string();
  const Result pr = call({"profile", "--dataset", ds, "--instance", inst, "--out", prof, "--csv",
                          csv});
  ASSERT_EQ(pr.code, kExitOk) << pr.err;
  const json pj = read_json(tmp / "prof" / "profile.json");
  EXPECT_EQ(pj["n"], 32);
  EXPECT_TRUE(pj["sigma_e_ratio"].is_number());
  EXPECT_TRUE(pj.contains("variance_identity"));
  EXPECT_EQ(slurp(csv).rfind("column,stdev,ratio,cruel\n", 0), 0u);

  const Result at = call({"attack", "--dataset", ds, "--instance", inst, "--out", rep});
  ASSERT_EQ(at.code, kExitOk) << at.err;
  const json rj = read_json(tmp / "rep" / "report.json");
  EXPECT_TRUE(rj["recovered"].get<bool>());
  EXPECT_EQ(rj["secret"].get<std::vector<std::int64_t>>(),
            read_vector(tmp / "inst" / "secret.mat"));

  // Every column cruel and no brute force beyond weight 0 cannot succeed.
  const Result fail = call({"attack", "--dataset", ds, "--instance", inst, "--max-weight", "0",
                            "--threshold", "1e-9"});
  EXPECT_EQ(fail.code, kExitNotRecovered);
  EXPECT_FALSE(json::parse(fail.out)["recovered"].get<bool>());
}

TEST(Cli, GenerationAndReductionAreDeterministic) {
  TempDir tmp;
  auto gen = [&](const std::string& name) {
    return call({"gen", "--n", "16", "--logq", "10", "--h", "3", "--seed", "17", "--rlwe",
                 "--with-truth", "--out", (tmp / name).string()})
        .code;
  };
  ASSERT_EQ(gen("a"), kExitOk);
  ASSERT_EQ(gen("b"), kExitOk);
  for (const char* f : {"A.mat", "b.mat", "a_poly.mat", "secret.mat", "e.mat"}) {
    EXPECT_EQ(slurp(tmp / "a" / f), slurp(tmp / "b" / f)) << f;
  }
  auto reduce = [&](const std::string& name, const std::string& jobs) {
    return call({"reduce", "--instance", (tmp / "a").string(), "--out", (tmp / name).string(),
                 "--count", "3", "--seed", "4", "--jobs", jobs})
        .code;
  };
  ASSERT_EQ(reduce("r1", "1"), kExitOk);
  ASSERT_EQ(reduce("r2", "3"), kExitOk);
  for (const char* m : {"matrix_0000", "matrix_0001", "matrix_0002"}) {
    for (const char* f : {"A_red.mat", "b_red.mat", "R.mat"}) {
      EXPECT_EQ(slurp(tmp / "r1" / m / f), slurp(tmp / "r2" / m / f)) << m << "/" << f;
    }
  }
  ::setenv(kJobsEnv, "2", 1);
  ASSERT_EQ(reduce("r3", "1"), kExitOk);
  ::unsetenv(kJobsEnv);
  EXPECT_EQ(slurp(tmp / "r1" / "matrix_0001" / "R.mat"), slurp(tmp / "r3" / "matrix_0001" / "R.mat"));

  const Result ra = call({"rlwe-attack", "--dataset", (tmp / "r1").string(), "--instance",
                          (tmp / "a").string(), "--stride", "4"});
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  const json rj = json::parse(ra.out);
  EXPECT_EQ(rj["secret"].get<std::vector<std::int64_t>>(), read_vector(tmp / "a" / "secret.mat"));
  EXPECT_EQ(rj["window"].get<std::size_t>() % 4, 0u);
}

TEST(Cli, EstimateReferenceRow) {
  const Result r = call({"estimate", "--n", "256", "--logq", "12", "--nu", "143", "--h", "12",
                         "--alpha", "2^-128", "--beta", "1e-5", "--worst"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["case"], "worst");
  EXPECT_NEAR(j["M"].get<double>() / 5.67e4, 1.0, 0.1);
  const Result both = call({"estimate", "--n", "256", "--logq", "12", "--h", "12"});
  ASSERT_EQ(both.code, kExitOk);
  const json bj = json::parse(both.out);
  EXPECT_FALSE(bj.contains("case"));
  EXPECT_EQ(bj["nu"], 143);
  EXPECT_TRUE(bj["estimate"]["M_average"].is_number());
}

TEST(Cli, EstimateRlweCsv) {
  TempDir tmp;
  const std::string path = (tmp / "t.csv").string();
  const Result r = call({"estimate-rlwe", "--n", "64", "--nu", "20", "--h-min", "4", "--h-max",
                         "6", "--secrets", "200", "--out", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(slurp(path));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,nu,h,T_lwe,T_rlwe,ratio");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(line.rfind("64,20,", 0), 0u);
  }
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace slwe::cli
