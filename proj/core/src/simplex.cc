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

#include "idpas/simplex.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "idpas/errors.h"

namespace idpas {
namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorInterval = 100;
constexpr int kDegenerateRunBeforeBland = 50;
constexpr int kMaxRefactorRetries = 3;

}  // namespace

BoundedSimplex::BoundedSimplex(const MipInstance& inst)
    : m_(inst.num_rows()),
      n_(inst.num_vars()),
      cols_(n_ + m_),
      a_(static_cast<std::size_t>(m_) * n_, 0.0),
      rhs_(m_),
      cost_(cols_, 0.0),
      lower_(inst.lower),
      upper_(inst.upper),
      lb_(cols_),
      ub_(cols_),
      tableau_(static_cast<std::size_t>(m_) * cols_),
      head_(m_),
      status_(cols_, kAtLower),
      x_basic_(m_) {
  for (int i = 0; i < m_; ++i) {
    const Row& row = inst.rows[i];
    for (const Term& t : row.terms) a_[static_cast<std::size_t>(i) * n_ + t.var] += t.coeff;
    rhs_[i] = row.rhs;
    switch (row.sense) {
      case RowSense::kLe:
        lb_[n_ + i] = 0.0;
        ub_[n_ + i] = kInf;
        break;
      case RowSense::kGe:
        lb_[n_ + i] = -kInf;
        ub_[n_ + i] = 0.0;
        break;
      case RowSense::kEq:
        lb_[n_ + i] = 0.0;
        ub_[n_ + i] = 0.0;
        break;
    }
  }
  std::copy(inst.objective.begin(), inst.objective.end(), cost_.begin());
}

void BoundedSimplex::ColdStart() {
  std::fill(tableau_.begin(), tableau_.end(), 0.0);
  for (int i = 0; i < m_; ++i) {
    double* row = &tableau_[static_cast<std::size_t>(i) * cols_];
    std::copy_n(&a_[static_cast<std::size_t>(i) * n_], n_, row);
    row[n_ + i] = 1.0;
    head_[i] = n_ + i;
  }
  std::fill(status_.begin(), status_.end(), kAtLower);
  for (int i = 0; i < m_; ++i) status_[n_ + i] = kBasic;
  work_ += static_cast<std::int64_t>(m_) * cols_;
  pivots_since_refactor_ = 0;
  tableau_valid_ = true;
}

void BoundedSimplex::Refactor(const std::vector<int>& wanted_basic) {
  std::vector<Status> saved(status_);
  ColdStart();
  std::vector<char> wanted(cols_, 0);
  for (int j : wanted_basic) {
    if (j >= 0 && j < cols_) wanted[j] = 1;
  }
  for (int j : wanted_basic) {
    if (j < 0 || j >= n_) continue;
    int best_row = -1;
    double best = 1e-7;
    for (int i = 0; i < m_; ++i) {
      if (head_[i] < n_ || wanted[head_[i]]) continue;
      const double v = std::abs(tableau_[static_cast<std::size_t>(i) * cols_ + j]);
      if (v > best) {
        best = v;
        best_row = i;
      }
    }
    if (best_row >= 0) Pivot(best_row, j);
  }
  // Columns that could not enter keep their previous nonbasic side.
  for (int j = 0; j < cols_; ++j) {
    if (status_[j] != kBasic) {
      status_[j] = saved[j] == kBasic ? kAtLower : saved[j];
      NormalizeNonbasic(j);
    }
  }
  pivots_since_refactor_ = 0;
}

void BoundedSimplex::Pivot(int row, int col) {
  double* prow = &tableau_[static_cast<std::size_t>(row) * cols_];
  const double inv = 1.0 / prow[col];
  for (int k = 0; k < cols_; ++k) prow[k] *= inv;
  prow[col] = 1.0;
  std::int64_t updated = 1;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    double* r = &tableau_[static_cast<std::size_t>(i) * cols_];
    const double f = r[col];
    if (f == 0.0) continue;
    for (int k = 0; k < cols_; ++k) r[k] -= f * prow[k];
    r[col] = 0.0;
    ++updated;
  }
  work_ += m_ + updated * cols_;
  status_[head_[row]] = kAtLower;
  status_[col] = kBasic;
  head_[row] = col;
  ++pivots_since_refactor_;
}

void BoundedSimplex::NormalizeNonbasic(int j) {
  const bool lb_finite = std::isfinite(lb_[j]);
  const bool ub_finite = std::isfinite(ub_[j]);
  switch (status_[j]) {
    case kAtLower:
      if (!lb_finite) status_[j] = ub_finite ? kAtUpper : kFreeZero;
      break;
    case kAtUpper:
      if (!ub_finite) status_[j] = lb_finite ? kAtLower : kFreeZero;
      break;
    case kFreeZero:
      if (lb_finite) {
        status_[j] = kAtLower;
      } else if (ub_finite) {
        status_[j] = kAtUpper;
      }
      break;
    case kBasic:
      break;
  }
}

double BoundedSimplex::NonbasicValue(int j) const {
  switch (status_[j]) {
    case kAtLower:
      return lb_[j];
    case kAtUpper:
      return ub_[j];
    default:
      return 0.0;
  }
}

void BoundedSimplex::ComputeBasicValues() {
  for (int i = 0; i < m_; ++i) {
    const double* row = &tableau_[static_cast<std::size_t>(i) * cols_];
    double v = 0.0;
    for (int k = 0; k < m_; ++k) v += rhs_[k] * row[n_ + k];
    for (int j = 0; j < cols_; ++j) {
      if (status_[j] != kBasic && row[j] != 0.0) v -= row[j] * NonbasicValue(j);
    }
    x_basic_[i] = v;
  }
  work_ += static_cast<std::int64_t>(m_) * cols_;
}

bool BoundedSimplex::ResidualOk() const {
  std::vector<double> x(cols_);
  for (int j = 0; j < cols_; ++j) x[j] = NonbasicValue(j);
  for (int i = 0; i < m_; ++i) x[head_[i]] = x_basic_[i];
  for (int i = 0; i < m_; ++i) {
    double act = x[n_ + i];
    const double* arow = &a_[static_cast<std::size_t>(i) * n_];
    double scale = 1.0 + std::abs(rhs_[i]);
    for (int j = 0; j < n_; ++j) {
      act += arow[j] * x[j];
      scale = std::max(scale, std::abs(arow[j] * x[j]));
    }
    if (std::abs(act - rhs_[i]) > 1e-9 * scale) return false;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = head_[i];
    if (x_basic_[i] < lb_[j] - 1e-7 || x_basic_[i] > ub_[j] + 1e-7) return false;
  }
  return true;
}

LpResult BoundedSimplex::Solve(std::span<const double> lower,
                               std::span<const double> upper,
                               const LpBasis* warm) {
  if (lower.size() != static_cast<std::size_t>(n_) ||
      upper.size() != static_cast<std::size_t>(n_)) {
    throw DimensionError("BoundedSimplex::Solve: bound vectors must have " +
                         std::to_string(n_) + " entries");
  }
  std::copy(lower.begin(), lower.end(), lb_.begin());
  std::copy(upper.begin(), upper.end(), ub_.begin());
  for (int j = 0; j < n_; ++j) {
    if (lb_[j] > ub_[j]) {
      LpResult r;
      r.status = LpStatus::kInfeasible;
      return r;
    }
  }
  if (warm != nullptr && !warm->empty()) {
    if (!(tableau_valid_ && warm->basic == head_)) Refactor(warm->basic);
    for (int j = 0; j < cols_; ++j) {
      if (status_[j] == kBasic) continue;
      status_[j] = j < static_cast<int>(warm->at_upper.size()) && warm->at_upper[j]
                       ? kAtUpper
                       : kAtLower;
    }
  } else {
    ColdStart();
  }
  for (int j = 0; j < cols_; ++j) {
    if (status_[j] != kBasic) NormalizeNonbasic(j);
  }
  ComputeBasicValues();
  return Iterate();
}

LpResult BoundedSimplex::Iterate() {
  LpResult result;
  const std::int64_t max_iterations = 50LL * (m_ + cols_) + 1000;
  std::vector<double> basic_cost(m_);
  std::vector<double> reduced(cols_);
  std::vector<double> column(m_);
  int degenerate_run = 0;
  bool bland = false;
  int retries = 0;

  while (true) {
    if (result.iterations > max_iterations) {
      tableau_valid_ = false;
      throw NumericalError("simplex iteration limit exceeded (" +
                           std::to_string(result.iterations) + " iterations)");
    }
    if (pivots_since_refactor_ >= kRefactorInterval) {
      std::vector<int> basis(head_);
      Refactor(basis);
      ComputeBasicValues();
    }

    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      if (x_basic_[i] < lb_[j] - kPrimalTol) {
        basic_cost[i] = -1.0;
        phase1 = true;
      } else if (x_basic_[i] > ub_[j] + kPrimalTol) {
        basic_cost[i] = 1.0;
        phase1 = true;
      } else {
        basic_cost[i] = 0.0;
      }
    }
    if (!phase1) {
      for (int i = 0; i < m_; ++i) basic_cost[i] = cost_[head_[i]];
    }

    // Reduced costs of the nonbasic columns.
    for (int j = 0; j < cols_; ++j) reduced[j] = phase1 ? 0.0 : cost_[j];
    for (int i = 0; i < m_; ++i) {
      const double cb = basic_cost[i];
      if (cb == 0.0) continue;
      const double* row = &tableau_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) reduced[j] -= cb * row[j];
      work_ += cols_;
    }

    int entering = -1;
    int direction = 0;
    double best_score = 0.0;
    for (int j = 0; j < cols_; ++j) {
      const Status s = status_[j];
      if (s == kBasic || lb_[j] == ub_[j]) continue;
      const double d = reduced[j];
      int dir = 0;
      if ((s == kAtLower || s == kFreeZero) && d < -kDualTol) dir = 1;
      if ((s == kAtUpper || s == kFreeZero) && d > kDualTol) dir = -1;
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        direction = dir;
      }
    }

    if (entering < 0) {
      if (phase1) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      if (!ResidualOk()) {
        if (++retries > kMaxRefactorRetries) {
          tableau_valid_ = false;
          throw NumericalError("simplex residual check failed after " +
                               std::to_string(kMaxRefactorRetries) +
                               " refactorizations");
        }
        std::vector<int> basis(head_);
        Refactor(basis);
        ComputeBasicValues();
        continue;
      }
      result.status = LpStatus::kOptimal;
      result.x.assign(n_, 0.0);
      for (int j = 0; j < n_; ++j) {
        if (status_[j] != kBasic) result.x[j] = NonbasicValue(j);
      }
      for (int i = 0; i < m_; ++i) {
        if (head_[i] < n_) result.x[head_[i]] = x_basic_[i];
      }
      double obj = 0.0;
      for (int j = 0; j < n_; ++j) obj += cost_[j] * result.x[j];
      result.objective = obj;
      return result;
    }

    // Ratio test along x_entering += direction * t.
    for (int i = 0; i < m_; ++i) {
      column[i] = tableau_[static_cast<std::size_t>(i) * cols_ + entering];
    }
    double step = ub_[entering] - lb_[entering];  // bound flip distance
    int leaving_row = -1;
    bool leave_at_upper = false;
    double leaving_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double alpha = column[i];
      if (std::abs(alpha) <= kPivotTol) continue;
      const double rate = -direction * alpha;
      const int j = head_[i];
      const double x = x_basic_[i];
      double limit = kInf;
      bool at_upper = false;
      if (rate < 0.0) {
        if (x > ub_[j] + kPrimalTol) {
          limit = (x - ub_[j]) / -rate;
          at_upper = true;
        } else if (x >= lb_[j] - kPrimalTol && std::isfinite(lb_[j])) {
          limit = std::max(0.0, x - lb_[j]) / -rate;
        }
      } else {
        if (x < lb_[j] - kPrimalTol) {
          limit = (lb_[j] - x) / rate;
        } else if (x <= ub_[j] + kPrimalTol && std::isfinite(ub_[j])) {
          limit = std::max(0.0, ub_[j] - x) / rate;
          at_upper = true;
        }
      }
      if (limit == kInf) continue;
      bool take = false;
      if (limit < step - 1e-12) {
        take = true;
      } else if (leaving_row >= 0 && limit <= step + 1e-12) {
        take = bland ? head_[i] < head_[leaving_row]
                     : std::abs(alpha) > std::abs(leaving_pivot);
      }
      if (take) {
        step = limit;
        leaving_row = i;
        leave_at_upper = at_upper;
        leaving_pivot = alpha;
      }
    }

    if (step == kInf) {
      if (phase1) {
        tableau_valid_ = false;
        throw NumericalError("simplex phase 1 found an unbounded ray");
      }
      result.status = LpStatus::kUnbounded;
      return result;
    }

    ++result.iterations;
    if (step <= 1e-12) {
      if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    const double entering_value = NonbasicValue(entering) + direction * step;
    for (int i = 0; i < m_; ++i) x_basic_[i] -= direction * column[i] * step;
    work_ += m_;

    if (leaving_row < 0) {
      status_[entering] = direction > 0 ? kAtUpper : kAtLower;
      continue;
    }
    const int leaving = head_[leaving_row];
    Pivot(leaving_row, entering);
    status_[leaving] = leave_at_upper ? kAtUpper : kAtLower;
    NormalizeNonbasic(leaving);
    x_basic_[leaving_row] = entering_value;
  }
}

LpBasis BoundedSimplex::basis() const {
  LpBasis b;
  b.basic = head_;
  b.at_upper.resize(cols_);
  for (int j = 0; j < cols_; ++j) b.at_upper[j] = status_[j] == kAtUpper;
  return b;
}

LpResult SolveLpRelaxation(const MipInstance& inst) {
  Validate(inst);
  BoundedSimplex simplex(inst);
  return simplex.Solve();
}

}  // namespace idpas
