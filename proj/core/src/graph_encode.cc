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

#include "idpas/graph_encode.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "idpas/errors.h"

namespace idpas {
namespace {

double NonZero(double d) { return d > 0.0 ? d : 1.0; }

void AppendNumber(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

BipartiteGraph EncodeBipartite(const MipInstance& inst) {
  Validate(inst);
  const int n = inst.num_vars();
  const int m = inst.num_rows();
  BipartiteGraph g;
  g.var_features = Eigen::MatrixXd::Zero(n, kVarFeatures);
  g.cons_features = Eigen::MatrixXd::Zero(m, kConsFeatures);
  g.integer_mask.resize(n);

  double bound_scale = 0.0, obj_scale = 0.0, coeff_scale = 0.0;
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(inst.lower[j])) bound_scale = std::max(bound_scale, std::abs(inst.lower[j]));
    if (std::isfinite(inst.upper[j])) bound_scale = std::max(bound_scale, std::abs(inst.upper[j]));
    obj_scale = std::max(obj_scale, std::abs(inst.objective[j]));
  }
  std::vector<std::vector<double>> incident(n);
  for (int r = 0; r < m; ++r) {
    const Row& row = inst.rows[r];
    double row_scale = 0.0;
    for (const Term& t : row.terms) {
      row_scale = std::max(row_scale, std::abs(t.coeff));
      coeff_scale = std::max(coeff_scale, std::abs(t.coeff));
    }
    row_scale = NonZero(row_scale);
    for (const Term& t : row.terms) {
      if (t.coeff == 0.0) continue;
      g.edges.push_back({t.var, r, t.coeff / row_scale});
      incident[t.var].push_back(t.coeff);
    }
    g.cons_features(r, static_cast<int>(row.sense)) = 1.0;
    g.cons_features(r, 3) = row.rhs / std::max(std::abs(row.rhs), 1.0);
  }
  bound_scale = NonZero(bound_scale);
  obj_scale = NonZero(obj_scale);
  coeff_scale = NonZero(coeff_scale);

  for (int j = 0; j < n; ++j) {
    auto f = g.var_features.row(j);
    f(static_cast<int>(inst.kinds[j])) = 1.0;
    g.integer_mask[j] = inst.is_integer(j) ? 1 : 0;
    if (std::isfinite(inst.lower[j])) {
      f(kFeatLower) = inst.lower[j] / bound_scale;
      f(kFeatLowerFinite) = 1.0;
    }
    if (std::isfinite(inst.upper[j])) {
      f(kFeatUpper) = inst.upper[j] / bound_scale;
      f(kFeatUpperFinite) = 1.0;
    }
    f(kFeatObjective) = inst.objective[j] / obj_scale;
    const std::vector<double>& coeffs = incident[j];
    if (!coeffs.empty()) {
      f(kFeatDegree) = static_cast<double>(coeffs.size()) / m;
      double sum = 0.0, lo = coeffs[0], hi = coeffs[0];
      for (double c : coeffs) {
        sum += c;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      const double mean = sum / coeffs.size();
      double var = 0.0;
      for (double c : coeffs) var += (c - mean) * (c - mean);
      var /= coeffs.size();
      f(kFeatCoeffMean) = mean / coeff_scale;
      f(kFeatCoeffMin) = lo / coeff_scale;
      f(kFeatCoeffMax) = hi / coeff_scale;
      f(kFeatCoeffStd) = std::sqrt(var) / coeff_scale;
    }
    f(kFeatInObjective) = inst.objective[j] != 0.0 ? 1.0 : 0.0;
  }
  return g;
}

BipartiteGraph AppendIdentity(BipartiteGraph graph, int bits) {
  const int n = graph.num_vars();
  if (bits < 0 || bits > 62 || (n > 0 && (std::int64_t{1} << bits) < n)) {
    throw DimensionError("identity width " + std::to_string(bits) +
                         " cannot index " + std::to_string(n) + " variables");
  }
  const int base = static_cast<int>(graph.var_features.cols());
  graph.var_features.conservativeResize(Eigen::NoChange, base + bits);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < bits; ++b) {
      graph.var_features(i, base + b) = ((static_cast<std::int64_t>(i) >> (bits - 1 - b)) & 1) ? 1.0 : 0.0;
    }
  }
  graph.identity_width += bits;
  return graph;
}

std::string DumpGraph(const BipartiteGraph& g) {
  std::string out = "bipartite " + std::to_string(g.num_vars()) + " " +
                    std::to_string(g.num_cons()) + " " + std::to_string(g.edges.size()) +
                    " " + std::to_string(g.identity_width) + "\n";
  auto dump = [&](const Eigen::MatrixXd& mat) {
    for (int r = 0; r < mat.rows(); ++r) {
      for (int c = 0; c < mat.cols(); ++c) {
        if (c > 0) out += ' ';
        AppendNumber(out, mat(r, c));
      }
      out += '\n';
    }
  };
  dump(g.var_features);
  dump(g.cons_features);
  for (const GraphEdge& e : g.edges) {
    out += std::to_string(e.var) + " " + std::to_string(e.cons) + " ";
    AppendNumber(out, e.feature);
    out += '\n';
  }
  return out;
}

}  // namespace idpas
