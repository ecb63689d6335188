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

#ifndef IDPAS_SIMPLEX_H_
#define IDPAS_SIMPLEX_H_

#include <cstdint>
#include <span>
#include <vector>

#include "idpas/mip.h"

namespace idpas {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;  // structural values; meaningful when kOptimal
  double objective = 0.0;
  std::int64_t iterations = 0;
};

// Basis snapshot used to warm-start a later solve. Columns 0..n-1 are the
// structural variables, n..n+m-1 the row slacks.
struct LpBasis {
  std::vector<int> basic;                  // size m, column basic in each row
  std::vector<std::int8_t> at_upper;       // size n+m, nonbasic-at-upper flag

  bool empty() const { return basic.empty(); }
};

// Dense bounded-variable primal simplex over the rows of an instance.
// Each row i becomes a'x + s_i = rhs_i with slack bounds [0,inf) for LE,
// (-inf,0] for GE and [0,0] for EQ. Phase 1 minimizes the sum of bound
// infeasibilities of the basic variables (composite method), so any basis can
// serve as a starting point. Pricing is Dantzig's rule; after a run of
// degenerate pivots it falls back to Bland's rule until progress resumes.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const MipInstance& inst);

  // Solves min c'x with structural bounds [lower, upper] (size n). When `warm`
  // is non-empty the tableau is refactored to that basis first (or reused when
  // it already matches).
  LpResult Solve(std::span<const double> lower, std::span<const double> upper,
                 const LpBasis* warm = nullptr);
  LpResult Solve() { return Solve(lower_, upper_); }

  // Basis of the last solve.
  LpBasis basis() const;

  // Cumulative multiply-add count of all tableau operations so far; drives
  // the deterministic solver clock.
  std::int64_t work() const { return work_; }

  int num_rows() const { return m_; }
  int num_cols() const { return n_; }

 private:
  enum Status : std::int8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

  void ColdStart();
  void Refactor(const std::vector<int>& wanted_basic);
  void Pivot(int row, int col);
  void NormalizeNonbasic(int j);
  double NonbasicValue(int j) const;
  void ComputeBasicValues();
  bool ResidualOk() const;
  LpResult Iterate();

  int m_ = 0;
  int n_ = 0;
  int cols_ = 0;  // n + m
  std::vector<double> a_;     // m x n, row-major, original rows
  std::vector<double> rhs_;
  std::vector<double> cost_;  // size cols_
  std::vector<double> lower_, upper_;  // structural bounds from the instance
  std::vector<double> lb_, ub_;        // current bounds, size cols_

  std::vector<double> tableau_;  // m x cols_, B^{-1} [A I]
  std::vector<int> head_;
  std::vector<Status> status_;
  std::vector<double> x_basic_;
  bool tableau_valid_ = false;
  int pivots_since_refactor_ = 0;
  std::int64_t work_ = 0;
};

// Convenience wrapper: LP relaxation of `inst` (integrality dropped).
LpResult SolveLpRelaxation(const MipInstance& inst);

}  // namespace idpas

#endif  // IDPAS_SIMPLEX_H_
