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

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "slwe/attack.hpp"
#include "slwe/enumerate.hpp"
#include "slwe/reduction.hpp"
#include "slwe/stattest.hpp"

namespace slwe {
namespace {

LweInstance instance(std::size_t n, int logq, std::uint64_t seed) {
  Rng rng(seed);
  LweParams p;
  p.n = n;
  p.q = std::int64_t{1} << logq;
  p.h = 4;
  const Secret s = gen_secret(n, 4, rng);
  return gen_lwe(p, s, rng);
}

void BM_LllEmbedding(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LweInstance inst = instance(n, 10, 1);
  Rng rng(2);
  const Subsample sub = subsample(inst, n * 7 / 8, rng);
  const Embedding e = embed(sub.A, inst.params.modulus(), 10);
  for (auto _ : state) benchmark::DoNotOptimize(lll_reduce(e.basis, 0.99));
}
BENCHMARK(BM_LllEmbedding)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_Polish(benchmark::State& state) {
  const LweInstance inst = instance(32, 10, 3);
  Rng rng(4);
  const Embedding e = embed(subsample(inst, 28, rng).A, inst.params.modulus(), 10);
  const IntMatrix reduced = lll_reduce(e.basis, 0.99);
  for (auto _ : state) benchmark::DoNotOptimize(polish(reduced));
}
BENCHMARK(BM_Polish)->Unit(benchmark::kMillisecond);

void BM_ScanWeight(benchmark::State& state) {
  const auto weight = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  const std::int64_t q = 1 << 20;
  IntMatrix A(512, 40);
  IntVector b(512);
  for (auto& x : A.data()) x = rng.centered_residue(q);
  for (auto& x : b) x = rng.centered_residue(q);
  std::vector<std::size_t> cruel(40);
  for (std::size_t j = 0; j < 40; ++j) cruel[j] = j;
  const CruelScorer scorer(A, b, cruel, 512, Modulus(q));
  const std::uint64_t count = binomial(40, weight);
  for (auto _ : state) {
    double best = 1e300;
    scorer.scan(weight, 0, count, [&](const std::vector<std::size_t>&, double s) {
      if (s < best) best = s;
    });
    benchmark::DoNotOptimize(best);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(BM_ScanWeight)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_WrappedMoments(benchmark::State& state) {
  const Modulus q(std::int64_t{1} << 30);
  const double qd = q.as_double();
  const double v = static_cast<double>(state.range(0)) / 100.0 * qd * qd;
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_mod_moments(v, q));
}
BENCHMARK(BM_WrappedMoments)->Arg(1)->Arg(10)->Arg(100)->Arg(10000);

}  // namespace
}  // namespace slwe

BENCHMARK_MAIN();
