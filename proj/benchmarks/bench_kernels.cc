// benchmarks/bench_kernels.cc

// Copyright 2026  The cacem Authors

// See ../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "cacem/cif.h"
#include "cacem/ops.h"
#include "cacem/rng.h"

namespace {

using namespace cacem;

DenseMatrix Random(std::size_t r, std::size_t c, Rng &rng) {
  DenseMatrix m(r, c);
  for (double &x : m.values()) x = rng.Uniform() * 2.0 - 1.0;
  return m;
}

void BM_Matmul(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  Var a = MakeConstant(Random(n, n, rng));
  Var b = MakeConstant(Random(n, n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b)->value.data());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_MatmulBackward(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  Var a = MakeParameter(Random(n, n, rng));
  Var b = MakeParameter(Random(n, n, rng));
  for (auto _ : state) {
    a->ZeroGrad();
    b->ZeroGrad();
    Backward(sum(matmul(a, b)));
  }
}
BENCHMARK(BM_MatmulBackward)->Arg(64)->Arg(128);

void BM_MultiHeadAttention(benchmark::State &state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  Var q = MakeConstant(Random(t, 64, rng));
  Var k = MakeConstant(Random(t, 64, rng));
  Var v = MakeConstant(Random(t, 64, rng));
  for (auto _ : state) benchmark::DoNotOptimize(multi_head_attention(q, k, v, 4)->value.data());
}
BENCHMARK(BM_MultiHeadAttention)->Arg(16)->Arg(64)->Arg(128);

void BM_IntegrateAndFire(benchmark::State &state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  DenseMatrix frames = Random(t, 64, rng);
  std::vector<double> alpha(t);
  for (double &a : alpha) a = rng.Uniform() * 0.6;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        integrate_and_fire(frames, alpha, kFiringThreshold, TailPolicy::kFireIfAtLeastHalf)
            .embeddings.data());
}
BENCHMARK(BM_IntegrateAndFire)->Arg(64)->Arg(256)->Arg(1024);

void BM_IntegrateAndFireBackward(benchmark::State &state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  Var frames = MakeParameter(Random(t, 64, rng));
  DenseMatrix a(t, 1);
  for (double &x : a.values()) x = rng.Uniform() * 0.6;
  Var alpha = MakeParameter(a);
  for (auto _ : state) {
    frames->ZeroGrad();
    alpha->ZeroGrad();
    Backward(sum(integrate_and_fire(frames, alpha).embeddings));
  }
}
BENCHMARK(BM_IntegrateAndFireBackward)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
