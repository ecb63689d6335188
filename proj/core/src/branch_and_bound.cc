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

#include "idpas/branch_and_bound.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "idpas/errors.h"
#include "idpas/rng.h"
#include "idpas/simplex.h"

namespace idpas {
namespace {

constexpr std::int64_t kNodeOverheadWork = 2000;
constexpr int kMaxPoolRestarts = 3;
constexpr double kPlungeGapFraction = 0.25;

struct BoundChange {
  int var;
  double lb;
  double ub;
};

struct Node {
  std::int64_t id = 0;
  int depth = 0;
  double bound = -kInf;
  std::vector<BoundChange> changes;
  LpBasis basis;
  // Pseudo-cost bookkeeping for the branching that created this node.
  int branch_var = -1;
  int branch_dir = 0;  // -1 down, +1 up
  double branch_frac = 0.0;
};

double Scale(double v) { return std::max(1.0, std::abs(v)); }

// Distinct-by-integer-part solution store, best `capacity` by objective.
class SolutionStore {
 public:
  explicit SolutionStore(const MipInstance& inst, int capacity)
      : inst_(inst), capacity_(capacity) {}

  bool full() const {
    return static_cast<int>(by_key_.size()) >= capacity_;
  }
  double worst() const {
    double w = -kInf;
    for (const auto& [key, sol] : by_key_) w = std::max(w, sol.objective);
    return w;
  }
  void Add(const Solution& s) {
    std::vector<std::int64_t> key;
    for (int j = 0; j < inst_.num_vars(); ++j) {
      if (inst_.is_integer(j)) key.push_back(std::llround(s.values[j]));
    }
    auto it = by_key_.find(key);
    if (it != by_key_.end()) {
      if (s.objective < it->second.objective) it->second = s;
      return;
    }
    if (full()) {
      auto worst_it = by_key_.begin();
      for (auto jt = by_key_.begin(); jt != by_key_.end(); ++jt) {
        if (jt->second.objective > worst_it->second.objective) worst_it = jt;
      }
      if (!(s.objective < worst_it->second.objective)) return;
      by_key_.erase(worst_it);
    }
    by_key_.emplace(std::move(key), s);
  }
  std::vector<Solution> Sorted() const {
    std::vector<std::pair<std::vector<std::int64_t>, Solution>> items(
        by_key_.begin(), by_key_.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      return a.second.objective < b.second.objective;
    });
    std::vector<Solution> out;
    for (auto& item : items) out.push_back(std::move(item.second));
    return out;
  }

 private:
  const MipInstance& inst_;
  int capacity_;
  std::map<std::vector<std::int64_t>, Solution> by_key_;
};

class BranchAndBound {
 public:
  BranchAndBound(const MipInstance& inst, const SolverConfig& cfg)
      : inst_(inst),
        cfg_(cfg),
        simplex_(inst),
        store_(inst, std::max(1, cfg.pool_capacity)),
        rng_(cfg.rng_seed),
        pc_sum_(2, std::vector<double>(inst.num_vars(), 0.0)),
        pc_count_(2, std::vector<int>(inst.num_vars(), 0)),
        start_(std::chrono::steady_clock::now()) {}

  SolveResult Run();

 private:
  bool pool_mode() const { return cfg_.pool_capacity > 0; }
  double Now() const {
    if (cfg_.clock == ClockMode::kWall) {
      return cfg_.clock_offset +
             std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           start_)
                 .count();
    }
    return cfg_.clock_offset +
           static_cast<double>(simplex_.work() + overhead_work_) /
               kDeterministicWorkPerSecond;
  }
  double Cutoff() const {
    if (pool_mode()) {
      return store_.full() ? store_.worst() - 1e-9 * Scale(store_.worst()) : kInf;
    }
    return best_ ? best_->objective - 1e-9 * Scale(best_->objective) : kInf;
  }
  bool Better(const Node& a, const Node& b) const;
  // Best-bound search dives into a child of the node just processed while no
  // incumbent exists or while the node's bound stays close to the best open
  // bound.
  bool ShouldPlunge(double bound) const {
    if (cfg_.node_order != NodeOrder::kBestBound) return false;
    if (!best_ && !pool_mode()) return true;
    if (open_.empty()) return true;
    const double lowest = open_.front().bound;
    const double cutoff = Cutoff();
    if (!std::isfinite(cutoff)) return true;
    return bound <= lowest + kPlungeGapFraction * (cutoff - lowest);
  }
  void Push(Node node);
  Node Pop();
  void ProcessNode(Node node);
  void ConsiderCandidate(const std::vector<double>& x);
  void TryLockRounding(const std::vector<double>& x);
  void Accept(std::vector<double> values, const char* source);
  void ComputeLocks();
  int ChooseBranchVariable(const std::vector<double>& x,
                           const std::vector<double>& lb,
                           const std::vector<double>& ub);
  void UpdatePseudoCost(const Node& node, double objective);

  const MipInstance& inst_;
  const SolverConfig& cfg_;
  BoundedSimplex simplex_;
  SolutionStore store_;
  Rng rng_;
  std::vector<std::vector<double>> pc_sum_;
  std::vector<std::vector<int>> pc_count_;
  std::chrono::steady_clock::time_point start_;
  std::int64_t overhead_work_ = 0;

  // Per variable: 1 if some row may be violated by decreasing (down) or
  // increasing (up) its value.
  std::vector<char> down_lock_;
  std::vector<char> up_lock_;

  std::vector<Node> open_;
  std::optional<Node> plunge_;
  std::int64_t next_id_ = 0;
  std::int64_t nodes_ = 0;
  std::optional<Solution> best_;
  std::vector<Incumbent> incumbents_;
};

bool BranchAndBound::Better(const Node& a, const Node& b) const {
  if (cfg_.node_order == NodeOrder::kDepthFirst) {
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.id < b.id;
  }
  if (a.bound != b.bound) return a.bound < b.bound;
  return a.id < b.id;
}

void BranchAndBound::Push(Node node) {
  open_.push_back(std::move(node));
  std::push_heap(open_.begin(), open_.end(),
                 [this](const Node& a, const Node& b) { return Better(b, a); });
}

Node BranchAndBound::Pop() {
  std::pop_heap(open_.begin(), open_.end(),
                [this](const Node& a, const Node& b) { return Better(b, a); });
  Node node = std::move(open_.back());
  open_.pop_back();
  return node;
}

void BranchAndBound::ComputeLocks() {
  down_lock_.assign(inst_.num_vars(), 0);
  up_lock_.assign(inst_.num_vars(), 0);
  for (const Row& row : inst_.rows) {
    for (const Term& t : row.terms) {
      if (t.coeff == 0.0) continue;
      const bool le = row.sense != RowSense::kGe;
      const bool ge = row.sense != RowSense::kLe;
      if ((le && t.coeff < 0.0) || (ge && t.coeff > 0.0)) down_lock_[t.var] = 1;
      if ((le && t.coeff > 0.0) || (ge && t.coeff < 0.0)) up_lock_[t.var] = 1;
    }
  }
  overhead_work_ += inst_.num_vars();
}

void BranchAndBound::Accept(std::vector<double> values, const char* source) {
  Solution s;
  s.values = std::move(values);
  s.objective = EvaluateObjective(inst_, s.values);
  s.feasible = true;
  s.source = source;
  if (pool_mode()) store_.Add(s);
  if (!best_ || s.objective < best_->objective - 1e-9 * Scale(best_->objective)) {
    incumbents_.push_back({Now(), s.objective});
    best_ = std::move(s);
  }
}

void BranchAndBound::ConsiderCandidate(const std::vector<double>& x) {
  std::vector<double> rounded(x);
  for (int j = 0; j < inst_.num_vars(); ++j) {
    if (inst_.is_integer(j)) rounded[j] = std::round(rounded[j]);
  }
  if (CheckFeasibility(inst_, rounded, cfg_.feas_tol).feasible) {
    Accept(std::move(rounded), "solver");
  } else if (CheckFeasibility(inst_, x, cfg_.feas_tol).feasible) {
    Accept(x, "solver");
  }
}

// Rounds every fractional integer variable in a direction no row can object
// to; gives up if some variable is locked both ways.
void BranchAndBound::TryLockRounding(const std::vector<double>& x) {
  std::vector<double> rounded(x);
  for (int j = 0; j < inst_.num_vars(); ++j) {
    if (!inst_.is_integer(j)) continue;
    const double down = std::floor(x[j] + cfg_.integrality_tol);
    const double up = std::ceil(x[j] - cfg_.integrality_tol);
    if (down == up) {
      rounded[j] = down;
    } else if (!down_lock_[j]) {
      rounded[j] = down;
    } else if (!up_lock_[j]) {
      rounded[j] = up;
    } else {
      return;
    }
  }
  overhead_work_ += inst_.num_vars();
  if (EvaluateObjective(inst_, rounded) >= Cutoff()) return;
  if (CheckFeasibility(inst_, rounded, cfg_.feas_tol).feasible) {
    Accept(std::move(rounded), "rounding");
  }
}

int BranchAndBound::ChooseBranchVariable(const std::vector<double>& x,
                                         const std::vector<double>& lb,
                                         const std::vector<double>& ub) {
  int best = -1;
  double best_score = -1.0;
  double avg[2] = {1.0, 1.0};
  if (cfg_.branch_rule == BranchRule::kPseudoCost) {
    for (int d = 0; d < 2; ++d) {
      double sum = 0.0;
      int cnt = 0;
      for (int j = 0; j < inst_.num_vars(); ++j) {
        if (pc_count_[d][j] > 0) {
          sum += pc_sum_[d][j] / pc_count_[d][j];
          ++cnt;
        }
      }
      if (cnt > 0) avg[d] = sum / cnt;
    }
  }
  for (int j = 0; j < inst_.num_vars(); ++j) {
    if (!inst_.is_integer(j) || lb[j] == ub[j]) continue;
    const double frac = x[j] - std::floor(x[j]);
    if (std::min(frac, 1.0 - frac) <= cfg_.integrality_tol) continue;
    double score;
    if (cfg_.branch_rule == BranchRule::kPseudoCost) {
      const double down =
          pc_count_[0][j] > 0 ? pc_sum_[0][j] / pc_count_[0][j] : avg[0];
      const double up =
          pc_count_[1][j] > 0 ? pc_sum_[1][j] / pc_count_[1][j] : avg[1];
      score = std::max(down * frac, 1e-6) * std::max(up * (1.0 - frac), 1e-6);
    } else {
      score = std::min(frac, 1.0 - frac);
    }
    if (cfg_.rng_seed != 0) score *= 1.0 + 0.5 * rng_.Uniform();
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  overhead_work_ += inst_.num_vars();
  return best;
}

void BranchAndBound::UpdatePseudoCost(const Node& node, double objective) {
  if (node.branch_var < 0 || !std::isfinite(node.bound)) return;
  const double gain = std::max(0.0, objective - node.bound);
  const double dist = node.branch_dir < 0 ? node.branch_frac : 1.0 - node.branch_frac;
  if (dist <= 0.0) return;
  const int d = node.branch_dir < 0 ? 0 : 1;
  pc_sum_[d][node.branch_var] += gain / dist;
  pc_count_[d][node.branch_var] += 1;
}

void BranchAndBound::ProcessNode(Node node) {
  std::vector<double> lb(inst_.lower);
  std::vector<double> ub(inst_.upper);
  for (const BoundChange& c : node.changes) {
    lb[c.var] = std::max(lb[c.var], c.lb);
    ub[c.var] = std::min(ub[c.var], c.ub);
  }
  overhead_work_ += kNodeOverheadWork;
  ++nodes_;
  LpResult lp = simplex_.Solve(lb, ub, node.basis.empty() ? nullptr : &node.basis);
  if (lp.status == LpStatus::kInfeasible) return;
  if (lp.status == LpStatus::kUnbounded) {
    throw Error("instance '" + inst_.name +
                "': LP relaxation is unbounded; the MIP has no finite optimum");
  }
  UpdatePseudoCost(node, lp.objective);
  if (lp.objective >= Cutoff()) return;

  const int var = ChooseBranchVariable(lp.x, lb, ub);
  if (var >= 0) {
    TryLockRounding(lp.x);
    if (lp.objective >= Cutoff()) return;
  }
  LpBasis basis = simplex_.basis();
  auto build_child = [&](double child_lb, double child_ub, int branch_var,
                         int dir, double frac) {
    Node child;
    child.id = next_id_++;
    child.depth = node.depth + 1;
    child.bound = lp.objective;
    child.changes = node.changes;
    child.changes.push_back({branch_var, child_lb, child_ub});
    child.basis = basis;
    child.branch_var = dir != 0 ? branch_var : -1;
    child.branch_dir = dir;
    child.branch_frac = frac;
    return child;
  };
  auto make_child = [&](double child_lb, double child_ub, int branch_var,
                        int dir, double frac) {
    Push(build_child(child_lb, child_ub, branch_var, dir, frac));
  };

  if (var >= 0) {
    const double v = lp.x[var];
    const double frac = v - std::floor(v);
    Node down = build_child(lb[var], std::floor(v), var, -1, frac);
    Node up = build_child(std::ceil(v), ub[var], var, +1, frac);
    if (frac >= 0.5) std::swap(down, up);
    // `down` now holds the child nearer to the LP value.
    if (ShouldPlunge(lp.objective)) {
      plunge_ = std::move(down);
    } else {
      Push(std::move(down));
    }
    Push(std::move(up));
    return;
  }

  ConsiderCandidate(lp.x);
  if (!pool_mode()) return;
  // Pool mode keeps enumerating integer points below an integral node.
  for (int j = 0; j < inst_.num_vars(); ++j) {
    if (!inst_.is_integer(j) || lb[j] == ub[j]) continue;
    const double v = std::round(lp.x[j]);
    if (v - 1.0 >= lb[j]) make_child(lb[j], v - 1.0, j, 0, 0.0);
    make_child(v, v, j, 0, 0.0);
    if (v + 1.0 <= ub[j]) make_child(v + 1.0, ub[j], j, 0, 0.0);
    return;
  }
}

SolveResult BranchAndBound::Run() {
  Node root;
  root.id = next_id_++;
  Push(std::move(root));
  ComputeLocks();
  SolveResult result;
  bool limit_hit = false;
  while (!open_.empty() || plunge_) {
    if (nodes_ >= cfg_.node_limit || Now() >= cfg_.time_limit) {
      limit_hit = true;
      break;
    }
    Node node;
    if (plunge_) {
      node = std::move(*plunge_);
      plunge_.reset();
    } else {
      node = Pop();
    }
    if (node.bound >= Cutoff()) continue;
    ProcessNode(std::move(node));
  }

  result.incumbents = incumbents_;
  result.best_solution = best_;
  result.nodes = nodes_;
  result.elapsed = Now();
  if (pool_mode()) result.pool = store_.Sorted();
  if (limit_hit) {
    result.status = SolveStatus::kTimeLimit;
    double bound = kInf;
    for (const Node& n : open_) bound = std::min(bound, n.bound);
    if (plunge_) bound = std::min(bound, plunge_->bound);
    if (best_) bound = std::min(bound, best_->objective);
    result.best_bound = bound;
  } else if (best_) {
    result.status = SolveStatus::kOptimal;
    result.best_bound = best_->objective;
  } else {
    result.status = SolveStatus::kInfeasible;
    result.best_bound = kInf;
  }
  return result;
}

}  // namespace

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "Optimal";
    case SolveStatus::kFeasible:
      return "Feasible";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kTimeLimit:
      return "TimeLimit";
  }
  return "?";
}

void SolverConfig::Validate() const {
  if (!(time_limit > 0.0)) throw ConfigError("time_limit must be positive");
  if (node_limit <= 0) throw ConfigError("node_limit must be positive");
  if (!(integrality_tol > 0.0 && integrality_tol < 1e-2)) {
    throw ConfigError("integrality_tol must lie in (0, 1e-2)");
  }
  if (!(feas_tol > 0.0 && feas_tol < 1e-2)) {
    throw ConfigError("feas_tol must lie in (0, 1e-2)");
  }
  if (pool_capacity < 0) throw ConfigError("pool_capacity must be >= 0");
}

SolveResult SolveMip(const MipInstance& inst, const SolverConfig& cfg) {
  cfg.Validate();
  Validate(inst);
  BranchAndBound search(inst, cfg);
  return search.Run();
}

std::vector<Solution> CollectSolutionPool(const MipInstance& inst, int u_p,
                                          const SolverConfig& cfg,
                                          SolveStatus* status) {
  if (u_p < 1) throw ConfigError("u_p must be at least 1");
  SolverConfig run_cfg = cfg;
  run_cfg.pool_capacity = u_p;
  SolveResult first = SolveMip(inst, run_cfg);
  if (status != nullptr) *status = first.status;
  std::vector<Solution> pool = first.pool;
  if (first.status != SolveStatus::kTimeLimit ||
      static_cast<int>(pool.size()) >= u_p) {
    return pool;
  }
  SolutionStore store(inst, u_p);
  for (const Solution& s : pool) store.Add(s);
  for (int r = 0; r < kMaxPoolRestarts; ++r) {
    SolverConfig restart = run_cfg;
    restart.rng_seed = DeriveSeed(cfg.rng_seed, "pool-restart", r) | 1;
    restart.time_limit = cfg.time_limit / 2.0;
    restart.node_limit = std::max<std::int64_t>(1, cfg.node_limit / 2);
    for (const Solution& s : SolveMip(inst, restart).pool) store.Add(s);
    pool = store.Sorted();
    if (static_cast<int>(pool.size()) >= u_p) break;
  }
  return pool;
}

}  // namespace idpas
