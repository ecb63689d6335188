// Copyright 2026 The idpas Authors
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

#include <benchmark/benchmark.h>

#include "idpas/branch_and_bound.h"
#include "idpas/gat_model.h"
#include "idpas/graph_encode.h"
#include "idpas/instance_gen.h"
#include "idpas/simplex.h"

namespace idpas {
namespace {

const MipInstance& Mmcnp() {
  static const MipInstance inst = GenerateInstance(FamilyConfig{}, 0);
  return inst;
}

void BM_SolveMipNodeBudget(benchmark::State& state) {
  SolverConfig cfg;
  cfg.time_limit = 1e9;
  cfg.node_limit = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(SolveMip(Mmcnp(), cfg));
}
BENCHMARK(BM_SolveMipNodeBudget)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LpRelaxation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(SolveLpRelaxation(Mmcnp()));
}
BENCHMARK(BM_LpRelaxation)->Unit(benchmark::kMillisecond);

void BM_SolveSlap(benchmark::State& state) {
  FamilyConfig fam;
  fam.family = Family::kSlapLite;
  const MipInstance inst = GenerateInstance(fam, 0);
  SolverConfig cfg;
  cfg.time_limit = 1e9;
  for (auto _ : state) benchmark::DoNotOptimize(SolveMip(inst, cfg));
}
BENCHMARK(BM_SolveSlap)->Unit(benchmark::kMillisecond);

void BM_EncodeBipartite(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(AppendIdentity(EncodeBipartite(Mmcnp()), 16));
}
BENCHMARK(BM_EncodeBipartite);

GatParams Model(int hidden, int bits) {
  GatDims d;
  d.hidden = hidden;
  d.heads = 4;
  d.identity_bits = bits;
  d.var_in = kVarFeatures + bits;
  return InitParams(d, 1);
}

void BM_GatForward(benchmark::State& state) {
  const BipartiteGraph g = AppendIdentity(EncodeBipartite(Mmcnp()), 16);
  const GatParams params = Model(static_cast<int>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(Forward(params, g));
}
BENCHMARK(BM_GatForward)->Arg(16)->Arg(32);

void BM_GatGradient(benchmark::State& state) {
  const BipartiteGraph g = AppendIdentity(EncodeBipartite(Mmcnp()), 16);
  const GatParams params = Model(16, 16);
  TrainingSample s;
  for (char m : g.integer_mask) s.num_integer += m;
  s.labels.assign(50, std::vector<std::uint8_t>(s.num_integer, 0));
  for (auto _ : state) benchmark::DoNotOptimize(Gradient(params, g, s));
}
BENCHMARK(BM_GatGradient);

}  // namespace
}  // namespace idpas

BENCHMARK_MAIN();
