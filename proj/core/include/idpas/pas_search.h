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

#ifndef IDPAS_PAS_SEARCH_H_
#define IDPAS_PAS_SEARCH_H_

#include <string_view>
#include <utility>
#include <vector>

#include "idpas/branch_and_bound.h"
#include "idpas/gat_model.h"
#include "idpas/mip.h"

namespace idpas {

enum class PasVariant { kBinaryPas, kIdPas };

std::string_view ToString(PasVariant variant);
// Accepts "binary-pas" and "id-pas"; throws ConfigError otherwise.
PasVariant ParsePasVariant(std::string_view text);

struct NeighborhoodSpec {
  PasVariant variant = PasVariant::kIdPas;
  std::vector<int> x0;
  std::vector<int> x1;  // BinaryPaS only
  int delta = 0;
  int k0 = 0;
  int k1 = 0;
};

// Integer variables with finite bounds and 0 in [lb, ub], ascending.
std::vector<int> EligibleZeroIndices(const MipInstance& inst);
// Integer variables with bounds [0, 1], ascending.
std::vector<int> BinaryIndices(const MipInstance& inst);

// The k0 eligible variables with the smallest scores (ties: lower index),
// returned ascending. Throws ConfigError naming the eligible count when k0
// is too large.
std::vector<int> SelectX0(const Prediction& pred, const MipInstance& inst, int k0);

// Binary variables ranked by (score, index): X0 takes the first k0, X1 the
// last k1. Both returned ascending.
std::pair<std::vector<int>, std::vector<int>> SelectX0X1Binary(const Prediction& pred,
                                                               const MipInstance& inst,
                                                               int k0, int k1);

// Throws ValidationError when the spec breaks an invariant for `inst`.
void ValidateSpec(const MipInstance& inst, const NeighborhoodSpec& spec);

// Copy of `inst` restricted to the neighborhood. Original variables keep
// their indices; IdPas indicators z_i are appended in X0 order.
//   BinaryPaS: sum_{X0} x_i - sum_{X1} x_i <= delta - |X1|.
//   IdPas:     x_i - ub_i z_i <= 0, x_i - lb_i z_i >= 0 (omitted when
//              lb_i = 0), sum z_i <= delta.
MipInstance BuildNeighborhoodMip(const MipInstance& inst, const NeighborhoodSpec& spec);

struct PasOptions {
  PasVariant variant = PasVariant::kIdPas;
  int k0 = 0;
  int k1 = 0;
  int delta = 0;
};

struct PasResult {
  SolveResult result;  // projected onto the original variables
  NeighborhoodSpec spec;
  double inference_time = 0.0;  // seconds charged before the search
};

// Builds the spec from `pred`, solves the sub-MIP, projects every solution
// back and re-verifies the best one on `inst` (ValidationError if it
// fails). `cfg.clock_offset` is the time already spent.
PasResult SolveWithPrediction(const MipInstance& inst, const Prediction& pred,
                              const PasOptions& options, const SolverConfig& cfg);

// Encodes `inst` (appending identity bits when the model expects them),
// runs the model once and calls SolveWithPrediction with the inference time
// charged to the clock.
PasResult RunPas(const MipInstance& inst, const GatParams& params, const PasOptions& options,
                 const SolverConfig& cfg);

}  // namespace idpas

#endif  // IDPAS_PAS_SEARCH_H_
