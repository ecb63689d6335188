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

#ifndef IDPAS_TESTING_ORACLES_H_
#define IDPAS_TESTING_ORACLES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "idpas/mip.h"

// Reference computations that share no code path with the solver or the
// model: exhaustive lattice enumeration and finite differences.
namespace idpas::testing {

struct EnumeratedOptimum {
  double objective = 0.0;
  std::vector<double> x;
};

// Exhaustive depth-first enumeration over the integer box of a pure-integer
// instance, pruning only with interval bounds on row activity and on the
// objective. Returns nullopt when no lattice point is feasible.
std::optional<EnumeratedOptimum> EnumerateOptimum(const MipInstance& inst,
                                                  double tol = 1e-9);

// Calls `visit` on every feasible lattice point of a pure-integer instance.
void EnumerateFeasible(const MipInstance& inst,
                       const std::function<void(const std::vector<double>&)>& visit,
                       double tol = 1e-9);

// Random pure-integer instance with `num_vars` variables, bounds inside
// [0, max_bound], 1..max_rows rows of small integer coefficients.
MipInstance RandomOracleInstance(std::uint64_t seed, int num_vars,
                                 int max_bound = 3, int max_rows = 6);

// Central difference (f(x+h) - f(x-h)) / 2h.
double CentralDifference(const std::function<double(double)>& f, double x,
                         double h);

// Two-sided signed-rank p-value by visiting all 2^n sign assignments of the
// nonzero differences (mid-ranks for ties). Requires n <= 24.
double BruteForceSignedRankP(const std::vector<double>& differences);

}  // namespace idpas::testing

#endif  // IDPAS_TESTING_ORACLES_H_
