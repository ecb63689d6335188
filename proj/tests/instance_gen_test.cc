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

#include "idpas/instance_gen.h"

#include <gtest/gtest.h>

#include <cmath>
#include <queue>

#include "idpas/branch_and_bound.h"
#include "idpas/errors.h"

namespace idpas {
namespace {

FamilyConfig ChainConfig() {
  FamilyConfig cfg;
  MmcnpParams& p = cfg.mmcnp;
  p.vendors = p.fcs = p.lmds = 1;
  p.truck_types = 1;
  p.commodities = 1;
  p.direct_arcs = p.lateral_arcs = false;
  p.truck_capacity = {10.0};
  p.truck_cost = {40.0};
  p.demand_min = p.demand_max = 5.0;
  p.sigma_frac = 0.0;
  return cfg;
}

FamilyConfig SlapConfig() {
  FamilyConfig cfg;
  cfg.family = Family::kSlapLite;
  return cfg;
}

TEST(ReferenceNetworkTest, ChainHasTwoArcsOnePath) {
  ReferenceNetwork net = BuildReferenceNetwork(ChainConfig());
  EXPECT_EQ(net.arcs.size(), 2u);
  ASSERT_EQ(net.paths.size(), 1u);
  EXPECT_EQ(net.paths[0].arcs, (std::vector<int>{0, 1}));
}

TEST(ReferenceNetworkTest, SameSeedSameNetwork) {
  for (const FamilyConfig& cfg : {FamilyConfig{}, SlapConfig()}) {
    EXPECT_EQ(BuildReferenceNetwork(cfg), BuildReferenceNetwork(cfg));
  }
  FamilyConfig other;
  other.structure_seed = 2;
  EXPECT_NE(BuildReferenceNetwork(FamilyConfig{}).arcs, BuildReferenceNetwork(other).arcs);
}

TEST(ReferenceNetworkTest, DeskDefaultEveryCommodityReachable) {
  FamilyConfig cfg;
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  EXPECT_EQ(net.node_names.size(), 8u);
  EXPECT_EQ(net.arcs.size(), 60u);
  EXPECT_EQ(net.commodities.size(), 12u);
  EXPECT_LE(net.paths.size(), 200u);
  // Independent reachability check by breadth-first search over the arcs.
  for (const Commodity& c : net.commodities) {
    std::vector<char> seen(net.node_names.size(), 0);
    std::queue<int> q;
    q.push(c.origin);
    seen[c.origin] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const NetworkArc& a : net.arcs) {
        if (a.tail == u && !seen[a.head]) {
          seen[a.head] = 1;
          q.push(a.head);
        }
      }
    }
    EXPECT_TRUE(seen[c.destination]);
    EXPECT_GE(c.paths.size(), 1u);
    for (int pi : c.paths) {
      const NetworkPath& path = net.paths[pi];
      EXPECT_EQ(net.arcs[path.arcs.front()].tail, c.origin);
      EXPECT_EQ(net.arcs[path.arcs.back()].head, c.destination);
      for (std::size_t k = 1; k < path.arcs.size(); ++k) {
        EXPECT_EQ(net.arcs[path.arcs[k - 1]].head, net.arcs[path.arcs[k]].tail);
      }
    }
  }
}

TEST(ReferenceNetworkTest, PathCapRaisesConfigError) {
  FamilyConfig cfg;
  cfg.mmcnp.max_paths = 5;
  try {
    BuildReferenceNetwork(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("max_paths"), std::string::npos);
  }
}

TEST(GenInstanceTest, ChainOptimumUsesOneTruckPerArc) {
  MipInstance inst = GenerateInstance(ChainConfig(), 0);
  SolverConfig sc;
  sc.time_limit = 1e9;
  SolveResult r = SolveMip(inst, sc);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.best_solution->values[0], 1.0);
  EXPECT_EQ(r.best_solution->values[1], 1.0);
  EXPECT_NEAR(r.best_solution->values[2], 5.0, 1e-9);
}

TEST(GenInstanceTest, ZeroSpreadEqualsReference) {
  FamilyConfig m;
  m.mmcnp.sigma_frac = 0.0;
  FamilyConfig s = SlapConfig();
  s.slap.bound_spread = 0.0;
  for (const FamilyConfig& cfg : {m, s}) {
    ReferenceNetwork net = BuildReferenceNetwork(cfg);
    PerturbationDraw ref = ReferenceDraw(cfg, net);
    for (int seed : {0, 7, 99}) {
      PerturbationDraw draw = SamplePerturbation(cfg, net, seed);
      EXPECT_EQ(draw.values, ref.values);
      MipInstance a = BuildInstance(cfg, net, draw);
      MipInstance b = BuildInstance(cfg, net, ref);
      a.param_seed = b.param_seed = 0;
      a.name = b.name;
      EXPECT_EQ(a, b);
    }
  }
}

TEST(GenInstanceTest, SameSeedSameInstance) {
  FamilyConfig cfg;
  EXPECT_EQ(SerializeInstance(GenerateInstance(cfg, 3)),
            SerializeInstance(GenerateInstance(cfg, 3)));
  EXPECT_NE(SerializeInstance(GenerateInstance(cfg, 3)),
            SerializeInstance(GenerateInstance(cfg, 4)));
}

TEST(GenInstanceTest, RoundTripPreservesRowOrder) {
  MipInstance inst = GenerateInstance(FamilyConfig{}, 11);
  const std::string text = SerializeInstance(inst);
  EXPECT_EQ(SerializeInstance(ParseInstance(text)), text);
  EXPECT_EQ(ParseInstance(text), inst);
}

TEST(GenInstanceTest, StructureStableAcrossSeeds) {
  for (const FamilyConfig& cfg : {FamilyConfig{}, SlapConfig()}) {
    MipInstance base = GenerateInstance(cfg, 0);
    for (int seed = 1; seed < 20; ++seed) {
      MipInstance inst = GenerateInstance(cfg, seed);
      ASSERT_EQ(inst.num_vars(), base.num_vars());
      ASSERT_EQ(inst.num_rows(), base.num_rows());
      EXPECT_EQ(inst.kinds, base.kinds);
      EXPECT_EQ(inst.var_names, base.var_names);
      EXPECT_EQ(IntegerIndices(inst), IntegerIndices(base));
      for (int r = 0; r < inst.num_rows(); ++r) {
        EXPECT_EQ(inst.rows[r].sense, base.rows[r].sense);
        EXPECT_EQ(inst.rows[r].terms.size(), base.rows[r].terms.size());
      }
    }
  }
}

TEST(GenInstanceTest, ReferenceSolutionFeasibleForEveryDraw) {
  for (const FamilyConfig& cfg : {FamilyConfig{}, SlapConfig()}) {
    ReferenceNetwork net = BuildReferenceNetwork(cfg);
    for (int seed = -1; seed < 30; ++seed) {
      PerturbationDraw draw =
          seed < 0 ? ReferenceDraw(cfg, net) : SamplePerturbation(cfg, net, seed);
      MipInstance inst = BuildInstance(cfg, net, draw);
      std::vector<double> x = ReferenceSolution(cfg, net, draw);
      EXPECT_TRUE(CheckFeasibility(inst, x, 1e-6).feasible) << inst.name;
    }
  }
}

TEST(GenInstanceTest, IntegerBoundsFinite) {
  for (const FamilyConfig& cfg : {FamilyConfig{}, SlapConfig()}) {
    MipInstance inst = GenerateInstance(cfg, 5);
    for (int j : IntegerIndices(inst)) {
      EXPECT_TRUE(std::isfinite(inst.lower[j]) && std::isfinite(inst.upper[j]));
    }
  }
}

TEST(GenInstanceTest, SlapDrawsAllSolveFeasibly) {
  FamilyConfig cfg = SlapConfig();
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  SolverConfig sc;
  sc.time_limit = 2.0;
  int feasible = 0;
  for (int seed = 0; seed < 100; ++seed) {
    MipInstance inst = BuildInstance(cfg, net, SamplePerturbation(cfg, net, seed));
    SolveResult r = SolveMip(inst, sc);
    if (r.best_solution && CheckFeasibility(inst, r.best_solution->values, 1e-6).feasible) {
      ++feasible;
    }
  }
  EXPECT_EQ(feasible, 100);
}

TEST(GenInstanceTest, MmcnpOptimaAreSparse) {
  FamilyConfig cfg;
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  SolverConfig sc;
  sc.time_limit = 0.5;
  double zero_fraction_sum = 0.0;
  const int count = 50;
  for (int seed = 0; seed < count; ++seed) {
    MipInstance inst = BuildInstance(cfg, net, SamplePerturbation(cfg, net, seed));
    SolveResult r = SolveMip(inst, sc);
    ASSERT_TRUE(r.best_solution.has_value());
    // Incumbent objective agrees with a recomputation from its values.
    EXPECT_NEAR(EvaluateObjective(inst, r.best_solution->values),
                r.incumbents.back().objective, 1e-9 * std::abs(r.incumbents.back().objective));
    const std::vector<int> ints = IntegerIndices(inst);
    int zeros = 0;
    for (int j : ints) zeros += std::abs(r.best_solution->values[j]) <= 1e-6;
    zero_fraction_sum += static_cast<double>(zeros) / ints.size();
  }
  EXPECT_GT(zero_fraction_sum / count, 0.5);
}

TEST(SamplePerturbationTest, ClampHoldsUnderHugeSigma) {
  FamilyConfig cfg = ChainConfig();
  cfg.mmcnp.sigma_frac = 100.0;
  cfg.mmcnp.clamp_lo_frac = 0.8;
  cfg.mmcnp.clamp_hi_frac = 1.2;
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  ASSERT_EQ(net.commodities[0].ref_demand, 5.0);
  for (int seed = 0; seed < 1000; ++seed) {
    const double d = SamplePerturbation(cfg, net, seed).values[0];
    EXPECT_GE(d, 4.0);
    EXPECT_LE(d, 6.0);
  }
}

TEST(SamplePerturbationTest, MeanWithinTwoPercent) {
  FamilyConfig cfg = ChainConfig();
  cfg.mmcnp.sigma_frac = 0.1;
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  double sum = 0.0;
  const int draws = 10000;
  for (int seed = 0; seed < draws; ++seed) sum += SamplePerturbation(cfg, net, seed).values[0];
  EXPECT_NEAR(sum / draws, 5.0, 0.02 * 5.0);
}

TEST(SamplePerturbationTest, SlapBoundsOrderedAndClamped) {
  FamilyConfig cfg = SlapConfig();
  cfg.slap.bound_spread = 3.0;
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  for (int seed = 0; seed < 200; ++seed) {
    PerturbationDraw d = SamplePerturbation(cfg, net, seed);
    for (std::size_t k = 0; k < d.values.size(); k += 2) {
      EXPECT_LE(d.values[k], d.values[k + 1]);
      EXPECT_GE(d.values[k], 0.0);
      EXPECT_LE(d.values[k + 1], cfg.slap.max_locomotives);
      EXPECT_EQ(d.values[k], std::round(d.values[k]));
    }
  }
}

TEST(FamilyConfigTest, RoundTripAndValidation) {
  FamilyConfig cfg = SlapConfig();
  cfg.structure_seed = 42;
  cfg.slap.stations = 6;
  FamilyConfig back = ParseFamilyConfig(SerializeFamilyConfig(cfg));
  EXPECT_EQ(SerializeFamilyConfig(back), SerializeFamilyConfig(cfg));
  EXPECT_THROW(ParseFamilyConfig(R"({"family": "nope"})"), ConfigError);
  EXPECT_THROW(ParseFamilyConfig(R"({"mmcnp": {"vendors": 0}})"), ConfigError);
  EXPECT_THROW(ParseFamilyConfig("{"), ConfigError);
}

}  // namespace
}  // namespace idpas
