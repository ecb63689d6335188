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

#ifndef IDPAS_BRANCH_AND_BOUND_H_
#define IDPAS_BRANCH_AND_BOUND_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "idpas/mip.h"

namespace idpas {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeLimit };
enum class BranchRule { kMostFractional, kPseudoCost };
enum class NodeOrder { kBestBound, kDepthFirst };

// kDeterministic measures time as simplex work (multiply-adds) divided by
// kDeterministicWorkPerSecond, so a run is reproducible bit-for-bit while
// still producing a time axis for the primal integral. kWall uses a
// monotonic clock.
enum class ClockMode { kDeterministic, kWall };

inline constexpr double kDeterministicWorkPerSecond = 7.0e8;

std::string_view ToString(SolveStatus status);

struct SolverConfig {
  double time_limit = 10.0;  // seconds on the configured clock
  std::int64_t node_limit = 10'000'000;
  double integrality_tol = 1e-6;
  double feas_tol = 1e-6;
  BranchRule branch_rule = BranchRule::kMostFractional;
  NodeOrder node_order = NodeOrder::kBestBound;
  // 0 keeps branching fully deterministic by index; any other value
  // perturbs branching scores with a seeded random factor (used for
  // diversified pool restarts).
  std::uint64_t rng_seed = 0;
  // > 0 turns on pool mode: every distinct integer-feasible point found is
  // kept (best `pool_capacity` by objective) and nodes are pruned only
  // against the worst pooled objective once the pool is full.
  int pool_capacity = 0;
  ClockMode clock = ClockMode::kDeterministic;
  // Seconds already on the clock when the search starts (e.g. model
  // inference charged to the same trace).
  double clock_offset = 0.0;

  // Throws ConfigError on non-positive limits or tolerances outside (0,1e-2).
  void Validate() const;
};

struct Incumbent {
  double time = 0.0;
  double objective = 0.0;

  friend bool operator==(const Incumbent&, const Incumbent&) = default;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kTimeLimit;
  // Strictly improving objectives, non-decreasing times.
  std::vector<Incumbent> incumbents;
  std::optional<Solution> best_solution;
  double best_bound = -kInf;
  std::int64_t nodes = 0;
  double elapsed = 0.0;  // clock reading at termination, includes offset
  // Pool mode only: distinct solutions, ascending objective.
  std::vector<Solution> pool;
};

// LP-based branch-and-bound. Node selection is by best bound (ties: lowest
// node id) or depth-first; branching is most-fractional (ties: lowest
// variable index) or pseudo-cost.
SolveResult SolveMip(const MipInstance& inst, const SolverConfig& cfg);

// Up to `u_p` feasible solutions with pairwise distinct rounded integer
// parts, ascending objective. If the first run stops on a limit with fewer
// than u_p solutions, restarts with perturbed branching add more.
std::vector<Solution> CollectSolutionPool(const MipInstance& inst, int u_p,
                                          const SolverConfig& cfg,
                                          SolveStatus* status = nullptr);

}  // namespace idpas

#endif  // IDPAS_BRANCH_AND_BOUND_H_
