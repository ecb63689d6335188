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

#include "idpas/pas_search.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "idpas/errors.h"
#include "idpas/graph_encode.h"

namespace idpas {
namespace {

void CheckPrediction(const Prediction& pred, const MipInstance& inst) {
  if (static_cast<int>(pred.scores.size()) != inst.num_vars() ||
      pred.valid.size() != pred.scores.size()) {
    throw DimensionError("prediction has " + std::to_string(pred.scores.size()) +
                         " scores for " + std::to_string(inst.num_vars()) + " variables");
  }
}

// Candidates sorted by (score, index).
std::vector<int> RankByScore(const Prediction& pred, std::vector<int> candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](int a, int b) { return pred.scores[a] < pred.scores[b]; });
  return candidates;
}

std::vector<int> Sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void Project(Solution& s, int n) {
  s.values.resize(n);
}

}  // namespace

std::string_view ToString(PasVariant variant) {
  return variant == PasVariant::kBinaryPas ? "binary-pas" : "id-pas";
}

PasVariant ParsePasVariant(std::string_view text) {
  if (text == "binary-pas") return PasVariant::kBinaryPas;
  if (text == "id-pas") return PasVariant::kIdPas;
  throw ConfigError("unknown variant '" + std::string(text) + "' (binary-pas, id-pas)");
}

std::vector<int> EligibleZeroIndices(const MipInstance& inst) {
  std::vector<int> out;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.is_integer(j) && std::isfinite(inst.lower[j]) && std::isfinite(inst.upper[j]) &&
        inst.lower[j] <= 0.0 && inst.upper[j] >= 0.0) {
      out.push_back(j);
    }
  }
  return out;
}

std::vector<int> BinaryIndices(const MipInstance& inst) {
  std::vector<int> out;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.is_integer(j) && inst.lower[j] == 0.0 && inst.upper[j] == 1.0) out.push_back(j);
  }
  return out;
}

std::vector<int> SelectX0(const Prediction& pred, const MipInstance& inst, int k0) {
  CheckPrediction(pred, inst);
  const std::vector<int> eligible = EligibleZeroIndices(inst);
  if (k0 < 0 || k0 > static_cast<int>(eligible.size())) {
    throw ConfigError("k0 = " + std::to_string(k0) + " but only " +
                      std::to_string(eligible.size()) + " variables are eligible");
  }
  std::vector<int> ranked = RankByScore(pred, eligible);
  ranked.resize(k0);
  return Sorted(std::move(ranked));
}

std::pair<std::vector<int>, std::vector<int>> SelectX0X1Binary(const Prediction& pred,
                                                               const MipInstance& inst,
                                                               int k0, int k1) {
  CheckPrediction(pred, inst);
  const std::vector<int> binary = BinaryIndices(inst);
  if (k0 < 0 || k1 < 0 || k0 + k1 > static_cast<int>(binary.size())) {
    throw ConfigError("k0 + k1 = " + std::to_string(k0 + k1) + " but only " +
                      std::to_string(binary.size()) + " variables are eligible");
  }
  const std::vector<int> ranked = RankByScore(pred, binary);
  std::vector<int> x0(ranked.begin(), ranked.begin() + k0);
  std::vector<int> x1(ranked.end() - k1, ranked.end());
  return {Sorted(std::move(x0)), Sorted(std::move(x1))};
}

void ValidateSpec(const MipInstance& inst, const NeighborhoodSpec& spec) {
  auto fail = [](const std::string& msg) { throw ValidationError("neighborhood: " + msg); };
  if (spec.delta < 0) fail("negative delta");
  const int n = inst.num_vars();
  std::set<int> seen;
  for (int i : spec.x0) {
    if (i < 0 || i >= n) fail("X0 index " + std::to_string(i) + " out of range");
    if (!seen.insert(i).second) fail("duplicate X0 index " + std::to_string(i));
    if (!inst.is_integer(i)) fail("X0 member " + inst.var_names[i] + " is continuous");
    if (!std::isfinite(inst.lower[i]) || !std::isfinite(inst.upper[i])) {
      fail("X0 member " + inst.var_names[i] + " has an infinite bound");
    }
    if (inst.lower[i] > 0.0 || inst.upper[i] < 0.0) {
      fail("X0 member " + inst.var_names[i] + " cannot be zero");
    }
  }
  if (spec.variant == PasVariant::kIdPas) {
    if (!spec.x1.empty()) fail("X1 must be empty for id-pas");
    return;
  }
  const std::vector<int> binary = BinaryIndices(inst);
  auto is_binary = [&](int i) { return std::binary_search(binary.begin(), binary.end(), i); };
  for (int i : spec.x0) {
    if (!is_binary(i)) fail("X0 member " + inst.var_names[i] + " is not binary");
  }
  for (int i : spec.x1) {
    if (i < 0 || i >= n || !is_binary(i)) fail("X1 index " + std::to_string(i) + " not binary");
    if (!seen.insert(i).second) fail("index " + std::to_string(i) + " in both X0 and X1");
  }
}

MipInstance BuildNeighborhoodMip(const MipInstance& inst, const NeighborhoodSpec& spec) {
  ValidateSpec(inst, spec);
  MipInstance sub = inst;
  if (spec.variant == PasVariant::kBinaryPas) {
    std::vector<Term> terms;
    for (int i : spec.x0) terms.push_back({i, 1.0});
    for (int i : spec.x1) terms.push_back({i, -1.0});
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    sub.AddRow(std::move(terms), RowSense::kLe,
               static_cast<double>(spec.delta) - static_cast<double>(spec.x1.size()));
    return sub;
  }
  std::vector<Term> cardinality;
  for (int i : spec.x0) {
    const int z = sub.AddVariable("z_" + inst.var_names[i], VarKind::kBinary, 0.0, 1.0, 0.0);
    cardinality.push_back({z, 1.0});
    if (inst.upper[i] != 0.0) {
      sub.AddRow({{i, 1.0}, {z, -inst.upper[i]}}, RowSense::kLe, 0.0);
    } else {
      sub.AddRow({{i, 1.0}}, RowSense::kLe, 0.0);
    }
    if (inst.lower[i] != 0.0) sub.AddRow({{i, 1.0}, {z, -inst.lower[i]}}, RowSense::kGe, 0.0);
  }
  if (!cardinality.empty()) sub.AddRow(std::move(cardinality), RowSense::kLe, spec.delta);
  return sub;
}

PasResult SolveWithPrediction(const MipInstance& inst, const Prediction& pred,
                              const PasOptions& options, const SolverConfig& cfg) {
  PasResult out;
  out.inference_time = cfg.clock_offset;
  NeighborhoodSpec& spec = out.spec;
  spec.variant = options.variant;
  spec.delta = options.delta;
  spec.k0 = options.k0;
  if (options.variant == PasVariant::kIdPas) {
    spec.x0 = SelectX0(pred, inst, options.k0);
  } else {
    spec.k1 = options.k1;
    std::tie(spec.x0, spec.x1) = SelectX0X1Binary(pred, inst, options.k0, options.k1);
  }
  const MipInstance sub = BuildNeighborhoodMip(inst, spec);
  out.result = SolveMip(sub, cfg);
  const int n = inst.num_vars();
  for (Solution& s : out.result.pool) Project(s, n);
  if (out.result.best_solution) {
    Solution& best = *out.result.best_solution;
    Project(best, n);
    const FeasibilityReport rep = CheckFeasibility(inst, best.values, cfg.feas_tol);
    if (!rep.feasible) {
      throw ValidationError("projected solution violates the original instance (row " +
                            std::to_string(rep.max_row_violation) + ", bound " +
                            std::to_string(rep.max_bound_violation) + ")");
    }
  }
  return out;
}

PasResult RunPas(const MipInstance& inst, const GatParams& params, const PasOptions& options,
                 const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  BipartiteGraph graph = EncodeBipartite(inst);
  const int bits = params.dims().identity_bits;
  if (bits > 0) graph = AppendIdentity(graph, bits);
  const Prediction pred = Forward(params, graph);
  double inference = 0.0;
  if (cfg.clock == ClockMode::kDeterministic) {
    inference = ForwardWork(params.dims(), graph) / kDeterministicWorkPerSecond;
  } else {
    inference = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  SolverConfig sub_cfg = cfg;
  sub_cfg.clock_offset = cfg.clock_offset + inference;
  PasResult out = SolveWithPrediction(inst, pred, options, sub_cfg);
  out.inference_time = inference;
  return out;
}

}  // namespace idpas
