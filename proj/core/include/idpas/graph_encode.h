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

#ifndef IDPAS_GRAPH_ENCODE_H_
#define IDPAS_GRAPH_ENCODE_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "idpas/mip.h"

namespace idpas {

inline constexpr int kVarFeatures = 15;
inline constexpr int kConsFeatures = 4;
inline constexpr int kEdgeFeatures = 1;

// Variable feature columns.
enum VarFeature : int {
  kFeatContinuous = 0,
  kFeatBinary = 1,
  kFeatGeneralInteger = 2,
  kFeatLower = 3,
  kFeatUpper = 4,
  kFeatLowerFinite = 5,
  kFeatUpperFinite = 6,
  kFeatObjective = 7,
  kFeatDegree = 8,
  kFeatCoeffMean = 9,
  kFeatCoeffMin = 10,
  kFeatCoeffMax = 11,
  kFeatCoeffStd = 12,
  kFeatInObjective = 13,
  kFeatReserved = 14,
};

struct GraphEdge {
  int var = 0;
  int cons = 0;
  double feature = 0.0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct BipartiteGraph {
  Eigen::MatrixXd var_features;   // n x (15 + identity_width)
  Eigen::MatrixXd cons_features;  // m x 4
  std::vector<GraphEdge> edges;   // one per nonzero, row-major
  std::vector<char> integer_mask;
  int identity_width = 0;

  int num_vars() const { return static_cast<int>(var_features.rows()); }
  int num_cons() const { return static_cast<int>(cons_features.rows()); }
};

// Static features: bounds scaled by the largest finite |bound|, objective
// by max |c|, degree by m, incident coefficient statistics by max |A|;
// constraints get a sense one-hot and rhs / max(|rhs|, 1); edges carry the
// coefficient over the largest |coefficient| of their row. Zero
// denominators become 1.
BipartiteGraph EncodeBipartite(const MipInstance& inst);

// Appends the B-bit big-endian binary expansion of each variable index.
// Throws DimensionError when 2^B < n.
BipartiteGraph AppendIdentity(BipartiteGraph graph, int bits);

// Text dump: "bipartite n m edges B" header, var rows, cons rows, then
// "var cons feature" triples.
std::string DumpGraph(const BipartiteGraph& graph);

}  // namespace idpas

#endif  // IDPAS_GRAPH_ENCODE_H_
