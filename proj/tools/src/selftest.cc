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

#include "selftest.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "idpas/branch_and_bound.h"
#include "idpas/gat_model.h"
#include "idpas/graph_encode.h"
#include "idpas/pas_search.h"
#include "idpas/rng.h"
#include "idpas/testing/oracles.h"
#include "idpas/testing/reference_gat.h"

namespace idpas {
namespace {

SolverConfig Exhaustive() {
  SolverConfig cfg;
  cfg.time_limit = 1e9;
  cfg.node_limit = 5'000'000;
  return cfg;
}

bool GradientSuite(std::ostream& log) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const MipInstance inst = testing::RandomOracleInstance(seed, 5, 3, 3);
    const BipartiteGraph g = EncodeBipartite(inst);
    GatDims dims;
    dims.hidden = 4;
    dims.heads = 2;
    const GatParams params = InitParams(dims, seed);
    Rng rng(seed);
    TrainingSample s;
    s.num_integer = inst.num_vars();
    for (int u = 0; u < 3; ++u) {
      std::vector<std::uint8_t> row(s.num_integer);
      for (auto& v : row) v = rng.Uniform() < 0.5;
      s.labels.push_back(row);
    }
    const GatParams grad = Gradient(params, g, s);
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double fd = testing::ReferenceFiniteDifference(params, g, s, k, 1e-4);
      const double a = grad.data()[k];
      if (std::abs(a) <= 1e-8) continue;
      worst = std::max(worst, std::abs(a - fd) / std::max(std::abs(a), std::abs(fd)));
    }
  }
  const bool ok = worst < 1e-4;
  log << (ok ? "PASS" : "FAIL") << " gradient check: worst relative error " << worst << "\n";
  return ok;
}

bool EnumerationSuite(std::ostream& log) {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MipInstance inst = testing::RandomOracleInstance(seed, 8);
    const auto opt = testing::EnumerateOptimum(inst);
    const SolveResult r = SolveMip(inst, Exhaustive());
    if (!opt) {
      mismatches += r.status != SolveStatus::kInfeasible;
    } else {
      mismatches += !r.best_solution || std::abs(r.best_solution->objective - opt->objective) > 1e-6;
    }
  }
  log << (mismatches == 0 ? "PASS" : "FAIL") << " enumeration equivalence: " << mismatches
      << " mismatches on 20 instances\n";
  return mismatches == 0;
}

bool NeighborhoodSuite(std::ostream& log) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MipInstance inst = testing::RandomOracleInstance(100 + seed, 8);
    const auto opt = testing::EnumerateOptimum(inst);
    const int eligible = static_cast<int>(EligibleZeroIndices(inst).size());
    Rng rng(seed);
    Prediction pred;
    pred.valid.assign(inst.num_vars(), 1);
    for (int j = 0; j < inst.num_vars(); ++j) pred.scores.push_back(rng.Uniform());
    for (int delta = 0; delta <= eligible; ++delta) {
      PasOptions o;
      o.k0 = eligible;
      o.delta = delta;
      const PasResult r = SolveWithPrediction(inst, pred, o, Exhaustive());
      if (r.result.best_solution) {
        const auto& x = r.result.best_solution->values;
        failures += static_cast<int>(x.size()) != inst.num_vars();
        failures += !CheckFeasibility(inst, x, 1e-6).feasible;
      }
      if (delta == eligible) {
        failures += opt.has_value() != r.result.best_solution.has_value();
        if (opt && r.result.best_solution) {
          failures += std::abs(r.result.best_solution->objective - opt->objective) > 1e-6;
        }
      }
    }
  }
  log << (failures == 0 ? "PASS" : "FAIL") << " neighborhood soundness: " << failures
      << " failures on 20 instances\n";
  return failures == 0;
}

}  // namespace

bool RunSelfTest(std::ostream& log) {
  const bool a = GradientSuite(log);
  const bool b = EnumerationSuite(log);
  const bool c = NeighborhoodSuite(log);
  return a && b && c;
}

}  // namespace idpas
