// Copyright 2026 The pwsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "pwsel/gf.hpp"
#include "pwsel/instances.hpp"
#include "pwsel/matroid.hpp"
#include "pwsel/pifam.hpp"
#include "pwsel/schemes.hpp"
#include "pwsel/verify.hpp"

namespace {

using namespace pwsel;

void BM_RankGf2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto m = gf::random_matrix(n, n, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gf::matrix_rank(m));
}
BENCHMARK(BM_RankGf2)->Arg(64)->Arg(256)->Arg(512);

void BM_RankGf101(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto m = gf::random_matrix(n, n, 101, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gf::matrix_rank(m));
}
BENCHMARK(BM_RankGf101)->Arg(32)->Arg(128);

void BM_WeightedRank(benchmark::State& state) {
  const matroid::GraphicMatroid g = matroid::GraphicMatroid::complete(static_cast<std::size_t>(state.range(0)));
  Rng rng(2);
  std::vector<std::uint32_t> e(g.num_edges());
  std::vector<double> w(g.num_edges());
  for (std::uint32_t i = 0; i < e.size(); ++i) {
    e[i] = i;
    w[i] = rng.uniform01();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        matroid::weighted_rank(g, std::span<const std::uint32_t>(e), std::span<const double>(w)).value);
  }
}
BENCHMARK(BM_WeightedRank)->Arg(16)->Arg(64);

void BM_ProphetSample(benchmark::State& state) {
  const auto kappa = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  instances::ProphetOptions opt;
  opt.compute_e_hard = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(instances::sample_prophet_instance(std::size_t{1} << (2 * kappa), kappa, rng, opt));
  }
}
BENCHMARK(BM_ProphetSample)->Arg(2)->Arg(3)->Arg(4);

void BM_CrsSample(benchmark::State& state) {
  const instances::CrsInstance inst(5, 5, 2);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(inst.sample(rng));
}
BENCHMARK(BM_CrsSample);

void BM_OcrsBalance(benchmark::State& state) {
  const instances::CrsInstance inst(3, 4, 2);
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(verify::ocrs_balance(inst, static_cast<std::uint64_t>(state.range(0)), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OcrsBalance)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_PairwiseUniform(benchmark::State& state) {
  const pifam::PairwiseUniform f(101, 100);
  Rng rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(f.sample(rng));
}
BENCHMARK(BM_PairwiseUniform);

}  // namespace

BENCHMARK_MAIN();
