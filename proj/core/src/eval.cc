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

#include "idpas/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "idpas/errors.h"
#include "idpas/parallel.h"

namespace idpas {
namespace {

constexpr double kWinTol = 1e-9;

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Num(const std::optional<double>& v) { return v ? Num(*v) : std::string(); }

double Mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// Sample standard deviation; 0 for fewer than two values.
double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

std::optional<double> Improvement(double base, double value) {
  if (base <= 0.0) return std::nullopt;
  return (base - value) / base * 100.0;
}

std::optional<double> BestOf(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

std::optional<double> FinalObjective(const SolveResult& r) {
  if (!r.best_solution) return std::nullopt;
  return r.best_solution->objective;
}

}  // namespace

double PrimalGapRaw(std::optional<double> v, double v_star) {
  if (!v || *v * v_star < 0.0) return 1.0;
  return std::abs(*v - v_star) / std::max(std::abs(v_star), kGapEpsilon);
}

double PrimalGap(std::optional<double> v, double v_star) {
  return std::min(PrimalGapRaw(v, v_star), 1.0);
}

double GapAt(std::span<const Incumbent> trace, double v_star, double t) {
  double gap = 1.0;
  for (const Incumbent& inc : trace) {
    if (inc.time > t) break;
    gap = PrimalGap(inc.objective, v_star);
  }
  return gap;
}

double PrimalIntegral(std::span<const Incumbent> trace, double v_star, double horizon) {
  if (!(horizon > 0.0)) throw ConfigError("primal integral horizon must be positive");
  double prev_time = 0.0;
  for (const Incumbent& inc : trace) {
    if (inc.time < prev_time) {
      throw ConfigError("incumbent trace is not sorted by time (" + Num(inc.time) + " after " +
                        Num(prev_time) + ")");
    }
    prev_time = inc.time;
  }
  double integral = 0.0;
  double gap = 1.0;
  double t = 0.0;
  for (const Incumbent& inc : trace) {
    if (inc.time > horizon) break;
    integral += gap * (inc.time - t);
    t = inc.time;
    gap = PrimalGap(inc.objective, v_star);
  }
  return integral + gap * (horizon - t);
}

WilcoxonResult WilcoxonSignedRank(std::span<const double> a, std::span<const double> b,
                                  WilcoxonMethod method) {
  if (a.size() != b.size()) {
    throw ConfigError("wilcoxon: samples have different lengths (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
  std::vector<double> d;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) d.push_back(a[k] - b[k]);
  }
  WilcoxonResult res;
  res.n = static_cast<int>(d.size());
  if (d.empty()) {
    res.all_zero = true;
    return res;
  }
  if (res.n < 5) {
    throw ConfigError("wilcoxon: need at least 5 nonzero differences, got " +
                      std::to_string(res.n));
  }
  const int n = res.n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return std::abs(d[x]) < std::abs(d[y]); });
  // Doubled mid-ranks are integers.
  std::vector<int> rank2(n);
  double tie_term = 0.0;
  for (int lo = 0; lo < n;) {
    int hi = lo;
    while (hi + 1 < n && std::abs(d[order[hi + 1]]) == std::abs(d[order[lo]])) ++hi;
    const int t = hi - lo + 1;
    for (int k = lo; k <= hi; ++k) rank2[order[k]] = lo + hi + 2;
    tie_term += static_cast<double>(t) * t * t - t;
    lo = hi + 1;
  }
  int w2 = 0;
  for (int k = 0; k < n; ++k) {
    if (d[k] > 0) w2 += rank2[k];
  }
  res.w_plus = w2 / 2.0;
  res.exact = method == WilcoxonMethod::kExact || (method == WilcoxonMethod::kAuto && n <= 20);
  if (res.exact) {
    const int total = n * (n + 1);
    std::vector<double> dist(total + 1, 0.0);
    dist[0] = 1.0;
    int reach = 0;
    for (int k = 0; k < n; ++k) {
      for (int s = reach; s >= 0; --s) {
        dist[s + rank2[k]] += dist[s] * 0.5;
        dist[s] *= 0.5;
      }
      reach += rank2[k];
    }
    double lower = 0.0, upper = 0.0;
    for (int s = 0; s <= total; ++s) {
      if (s <= w2) lower += dist[s];
      if (s >= w2) upper += dist[s];
    }
    res.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
    return res;
  }
  const double mean = n * (n + 1) / 4.0;
  const double var = n * (n + 1) * (2.0 * n + 1) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return res;
  const double z = std::max(0.0, std::abs(res.w_plus - mean) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

int K0FromPercent(int percent, int eligible) {
  if (eligible <= 0) throw ConfigError("no eligible variables for the neighborhood");
  if (percent < 0 || percent > 100) {
    throw ConfigError("k0 percentage " + std::to_string(percent) + " outside [0, 100]");
  }
  return std::max(1, percent * eligible / 100);
}

PasOptions OptionsFromPercent(const MipInstance& inst, PasVariant variant, int k0_percent,
                              int k1_percent, int delta) {
  PasOptions opt;
  opt.variant = variant;
  opt.delta = delta;
  if (variant == PasVariant::kIdPas) {
    opt.k0 = K0FromPercent(k0_percent, static_cast<int>(EligibleZeroIndices(inst).size()));
  } else {
    const int binary = static_cast<int>(BinaryIndices(inst).size());
    opt.k0 = K0FromPercent(k0_percent, binary);
    opt.k1 = std::min(k1_percent * binary / 100, binary - opt.k0);
  }
  return opt;
}

std::size_t SelectGridPoint(const std::vector<GridPoint>& points) {
  if (points.empty()) throw ConfigError("empty grid");
  auto key = [](const GridPoint& p) {
    return std::make_tuple(p.mean_pi, p.mean_pg, p.k0_percent, p.delta);
  };
  std::size_t best = 0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (key(points[k]) < key(points[best])) best = k;
  }
  return best;
}

GridResult GridSearch(const std::vector<NamedInstance>& instances, const GatParams& model,
                      PasVariant variant, const std::vector<int>& deltas,
                      const std::vector<int>& k0_percents, const SolverConfig& cfg,
                      const std::vector<std::optional<double>>& reference, int jobs,
                      int k1_percent) {
  if (instances.empty() || deltas.empty() || k0_percents.empty()) {
    throw ConfigError("grid search needs instances, deltas and k0 percentages");
  }
  if (!reference.empty() && reference.size() != instances.size()) {
    throw ConfigError("grid search reference values do not match the instances");
  }
  GridResult grid;
  for (int delta : deltas) {
    for (int pct : k0_percents) grid.points.push_back({delta, pct, 0.0, 0.0, 0});
  }
  const int ni = static_cast<int>(instances.size());
  const int np = static_cast<int>(grid.points.size());
  std::vector<SolveResult> results(static_cast<std::size_t>(ni) * np);
  ParallelFor(ni * np, jobs, [&](int task) {
    const int p = task / ni, i = task % ni;
    const MipInstance& inst = instances[i].instance;
    const PasOptions opt = OptionsFromPercent(inst, variant, grid.points[p].k0_percent,
                                              k1_percent, grid.points[p].delta);
    results[task] = RunPas(inst, model, opt, cfg).result;
  });
  std::vector<std::optional<double>> v_star(ni);
  for (int i = 0; i < ni; ++i) {
    if (!reference.empty()) v_star[i] = reference[i];
    for (int p = 0; p < np; ++p) {
      v_star[i] = BestOf(v_star[i], FinalObjective(results[p * ni + i]));
    }
  }
  for (int p = 0; p < np; ++p) {
    std::vector<double> pg, pi;
    for (int i = 0; i < ni; ++i) {
      const SolveResult& r = results[p * ni + i];
      if (r.status == SolveStatus::kInfeasible) ++grid.points[p].infeasible;
      const double vs = v_star[i].value_or(0.0);
      pg.push_back(v_star[i] ? PrimalGap(FinalObjective(r), vs) : 1.0);
      pi.push_back(v_star[i] ? PrimalIntegral(r.incumbents, vs, cfg.time_limit)
                             : cfg.time_limit);
    }
    grid.points[p].mean_pg = Mean(pg);
    grid.points[p].mean_pi = Mean(pi);
  }
  grid.selected = SelectGridPoint(grid.points);
  return grid;
}

std::string GridCsv(const GridResult& grid) {
  std::string out = "delta,k0_percent,mean_pg,mean_pi,infeasible,selected\n";
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const GridPoint& p = grid.points[k];
    out += std::to_string(p.delta) + "," + std::to_string(p.k0_percent) + "," + Num(p.mean_pg) +
           "," + Num(p.mean_pi) + "," + std::to_string(p.infeasible) + "," +
           (k == grid.selected ? "1" : "0") + "\n";
  }
  return out;
}

Report BuildReport(const std::string& benchmark, const std::vector<std::string>& instances,
                   const std::vector<std::string>& approaches, const std::string& baseline,
                   const std::vector<RunRecord>& runs,
                   const std::vector<std::optional<double>>& reference, double horizon) {
  if (!reference.empty() && reference.size() != instances.size()) {
    throw ConfigError("reference values do not match the instances");
  }
  std::map<std::pair<std::string, std::string>, const RunRecord*> by_key;
  for (const RunRecord& r : runs) {
    if (!by_key.emplace(std::make_pair(r.instance, r.approach), &r).second) {
      throw ConfigError("duplicate run for " + r.instance + "/" + r.approach);
    }
  }
  Report rep;
  rep.benchmark = benchmark;
  rep.baseline = baseline;
  rep.horizon = horizon;
  const std::size_t na = approaches.size();
  rep.summary.resize(na);
  std::vector<std::vector<double>> pg(na), pi(na);
  // Per approach: instance -> (pg, pi), for pairing.
  std::vector<std::map<std::string, std::pair<double, double>>> paired(na);
  rep.curves.approaches = approaches;
  for (int k = 0; k < kCurvePoints; ++k) {
    rep.curves.times.push_back(horizon * k / (kCurvePoints - 1));
  }
  rep.curves.mean_gap.assign(na, std::vector<double>(kCurvePoints, 0.0));
  std::vector<int> curve_count(na, 0);

  for (std::size_t i = 0; i < instances.size(); ++i) {
    std::optional<double> v_star = reference.empty() ? std::nullopt : reference[i];
    for (const std::string& a : approaches) {
      auto it = by_key.find({instances[i], a});
      if (it != by_key.end()) v_star = BestOf(v_star, it->second->final_objective);
    }
    std::vector<std::optional<MetricsRecord>> row(na);
    for (std::size_t a = 0; a < na; ++a) {
      auto it = by_key.find({instances[i], approaches[a]});
      if (it == by_key.end()) {
        rep.missing.push_back(instances[i] + "/" + approaches[a]);
        continue;
      }
      const RunRecord& r = *it->second;
      MetricsRecord m;
      m.instance = instances[i];
      m.approach = approaches[a];
      m.status = r.status;
      m.final_objective = r.final_objective;
      m.v_star = v_star;
      if (v_star) {
        m.pg = PrimalGap(r.final_objective, *v_star);
        m.pg_raw = PrimalGapRaw(r.final_objective, *v_star);
        m.pi = PrimalIntegral(r.trace, *v_star, horizon);
      } else {
        m.pi = horizon;
      }
      for (int k = 0; k < kCurvePoints; ++k) {
        rep.curves.mean_gap[a][k] +=
            v_star ? GapAt(r.trace, *v_star, rep.curves.times[k]) : 1.0;
      }
      ++curve_count[a];
      pg[a].push_back(m.pg);
      pi[a].push_back(m.pi);
      paired[a][m.instance] = {m.pg, m.pi};
      row[a] = m;
    }
    double best_pg = kInf, best_pi = kInf;
    for (const auto& m : row) {
      if (!m) continue;
      best_pg = std::min(best_pg, m->pg);
      best_pi = std::min(best_pi, m->pi);
    }
    for (std::size_t a = 0; a < na; ++a) {
      if (!row[a]) continue;
      if (row[a]->pg <= best_pg + kWinTol) ++rep.summary[a].pg_wins;
      if (row[a]->pi <= best_pi + kWinTol) ++rep.summary[a].pi_wins;
      rep.metrics.push_back(*row[a]);
    }
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (curve_count[a] > 0) {
      for (double& g : rep.curves.mean_gap[a]) g /= curve_count[a];
    }
  }

  const auto base_it = std::find(approaches.begin(), approaches.end(), baseline);
  const std::size_t base =
      base_it == approaches.end() ? na : static_cast<std::size_t>(base_it - approaches.begin());
  for (std::size_t a = 0; a < na; ++a) {
    SummaryRow& s = rep.summary[a];
    s.approach = approaches[a];
    s.runs = static_cast<int>(pg[a].size());
    s.pg_mean = Mean(pg[a]);
    s.pg_std = StdDev(pg[a]);
    s.pi_mean = Mean(pi[a]);
    s.pi_std = StdDev(pi[a]);
    if (base == na || a == base || s.runs == 0) continue;
    s.pg_improvement = Improvement(Mean(pg[base]), s.pg_mean);
    s.pi_improvement = Improvement(Mean(pi[base]), s.pi_mean);
    std::vector<double> x_pg, y_pg, x_pi, y_pi;
    for (const auto& [inst, v] : paired[a]) {
      auto it = paired[base].find(inst);
      if (it == paired[base].end()) continue;
      x_pg.push_back(v.first);
      y_pg.push_back(it->second.first);
      x_pi.push_back(v.second);
      y_pi.push_back(it->second.second);
    }
    try {
      s.pg_p = WilcoxonSignedRank(x_pg, y_pg).p_value;
    } catch (const ConfigError&) {
    }
    try {
      s.pi_p = WilcoxonSignedRank(x_pi, y_pi).p_value;
    } catch (const ConfigError&) {
    }
  }
  return rep;
}

SuiteOutput EvaluateSuite(const std::vector<NamedInstance>& instances,
                          const std::vector<ApproachSpec>& approaches,
                          const SuiteOptions& options) {
  if (instances.empty() || approaches.empty()) {
    throw ConfigError("evaluation needs instances and approaches");
  }
  const int ni = static_cast<int>(instances.size());
  const int na = static_cast<int>(approaches.size());
  SuiteOutput out;
  out.runs.resize(static_cast<std::size_t>(ni) * na);
  out.reference.assign(ni, std::nullopt);
  const bool with_reference = options.reference_time_limit > 0.0;
  const int tasks = ni * (na + (with_reference ? 1 : 0));
  ParallelFor(tasks, options.jobs, [&](int task) {
    const int i = task % ni;
    const int a = task / ni;
    const MipInstance& inst = instances[i].instance;
    if (a == na) {
      SolverConfig cfg = options.solver;
      cfg.time_limit = options.reference_time_limit;
      out.reference[i] = FinalObjective(SolveMip(inst, cfg));
      return;
    }
    const ApproachSpec& spec = approaches[a];
    SolveResult r;
    if (!spec.model) {
      r = SolveMip(inst, options.solver);
    } else {
      const PasOptions opt =
          OptionsFromPercent(inst, spec.variant, spec.k0_percent, spec.k1_percent, spec.delta);
      r = RunPas(inst, *spec.model, opt, options.solver).result;
    }
    RunRecord& rec = out.runs[task];
    rec.instance = instances[i].ref;
    rec.approach = spec.name;
    rec.status = r.status;
    rec.trace = std::move(r.incumbents);
    rec.final_objective = FinalObjective(r);
  });
  std::vector<std::string> names, approach_names;
  for (const NamedInstance& n : instances) names.push_back(n.ref);
  for (const ApproachSpec& s : approaches) approach_names.push_back(s.name);
  out.report = BuildReport(options.benchmark, names, approach_names, approaches[0].name,
                           out.runs, out.reference, options.solver.time_limit);
  return out;
}

std::string MetricsCsv(const Report& report) {
  std::string out = "instance,approach,status,final_objective,v_star,pg,pg_raw,pi\n";
  for (const MetricsRecord& m : report.metrics) {
    out += m.instance + "," + m.approach + "," + std::string(ToString(m.status)) + "," +
           Num(m.final_objective) + "," + Num(m.v_star) + "," + Num(m.pg) + "," +
           Num(m.pg_raw) + "," + Num(m.pi) + "\n";
  }
  return out;
}

std::string SummaryCsv(const Report& report) {
  std::string out =
      "benchmark,approach,runs,pg_mean,pg_improvement_pct,pg_std,pg_wins,pi_mean,"
      "pi_improvement_pct,pi_std,pi_wins,pg_wilcoxon_p,pi_wilcoxon_p\n";
  for (const SummaryRow& s : report.summary) {
    out += report.benchmark + "," + s.approach + "," + std::to_string(s.runs) + "," +
           Num(s.pg_mean) + "," + Num(s.pg_improvement) + "," + Num(s.pg_std) + "," +
           std::to_string(s.pg_wins) + "," + Num(s.pi_mean) + "," + Num(s.pi_improvement) +
           "," + Num(s.pi_std) + "," + std::to_string(s.pi_wins) + "," + Num(s.pg_p) + "," +
           Num(s.pi_p) + "\n";
  }
  return out;
}

std::string CurvesCsv(const Report& report) {
  std::string out = "time";
  for (const std::string& a : report.curves.approaches) out += "," + a;
  out += "\n";
  for (std::size_t k = 0; k < report.curves.times.size(); ++k) {
    out += Num(report.curves.times[k]);
    for (const auto& series : report.curves.mean_gap) out += "," + Num(series[k]);
    out += "\n";
  }
  return out;
}

std::string ReportManifest(const Report& report) {
  nlohmann::ordered_json j;
  j["benchmark"] = report.benchmark;
  j["baseline"] = report.baseline;
  j["horizon_seconds"] = report.horizon;
  j["gap_epsilon"] = kGapEpsilon;
  j["notes"] = {
      "improvement percentages are relative to the baseline approach (the embedded solver)",
      "pg is capped at 1 and set to 1 when no incumbent exists or signs of v and v* differ",
      "v* is the best final objective over all approaches and the reference solve",
      "wins: every approach attaining the best value on an instance counts one win",
      "std columns are sample standard deviations",
      "wilcoxon p-values are two-sided, paired against the baseline; blank when fewer than 5 "
      "nonzero differences"};
  j["missing_runs"] = report.missing;
  j["files"]["metrics.csv"] = {
      {"instance", "test instance file"},
      {"approach", "approach name"},
      {"status", "solver status at termination"},
      {"final_objective", "objective of the best incumbent; blank if none"},
      {"v_star", "best-known objective for the instance; blank if none"},
      {"pg", "capped primal gap of the final incumbent"},
      {"pg_raw", "uncapped primal gap"},
      {"pi", "primal integral over the horizon, in gap-seconds"}};
  j["files"]["summary.csv"] = {
      {"benchmark", "instance family"},
      {"approach", "approach name"},
      {"runs", "instances with a completed run"},
      {"pg_mean", "mean capped primal gap"},
      {"pg_improvement_pct", "reduction of pg_mean versus the baseline, percent"},
      {"pg_std", "standard deviation of the primal gap"},
      {"pg_wins", "instances where the approach attains the best primal gap"},
      {"pi_mean", "mean primal integral"},
      {"pi_improvement_pct", "reduction of pi_mean versus the baseline, percent"},
      {"pi_std", "standard deviation of the primal integral"},
      {"pi_wins", "instances where the approach attains the best primal integral"},
      {"pg_wilcoxon_p", "signed-rank p-value of primal gaps versus the baseline"},
      {"pi_wilcoxon_p", "signed-rank p-value of primal integrals versus the baseline"}};
  nlohmann::ordered_json curves;
  curves["time"] = "seconds on the solver clock, " + std::to_string(kCurvePoints) +
                   " evenly spaced points over [0, horizon]";
  for (const std::string& a : report.curves.approaches) {
    curves[a] = "mean capped primal gap of " + a + " at that time";
  }
  j["files"]["curves.csv"] = curves;
  j["files"]["grid.csv"] = {
      {"delta", "neighborhood radius"},
      {"k0_percent", "share of eligible integer variables placed in X0"},
      {"mean_pg", "mean validation primal gap"},
      {"mean_pi", "mean validation primal integral"},
      {"infeasible", "validation instances with an infeasible sub-MIP"},
      {"selected", "1 for the chosen pair"}};
  return j.dump(2) + "\n";
}

std::string FormatSummaryTable(const Report& report) {
  auto mean_cell = [](double mean, const std::optional<double>& impr, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, mean);
    std::string s = buf;
    if (impr) {
      std::snprintf(buf, sizeof(buf), " (%.1f%%)", *impr);
      s += buf;
    }
    return s;
  };
  auto p_cell = [](const std::optional<double>& p) {
    if (!p) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", *p);
    return std::string(buf);
  };
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof(line), "%-12s %-10s | %-18s %-8s %-5s | %-18s %-8s %-5s | %-10s %-10s\n",
                "", "", "Primal Gap", "", "", "Primal Integral", "", "", "Wilcoxon p", "");
  os << line;
  std::snprintf(line, sizeof(line), "%-12s %-10s | %-18s %-8s %-5s | %-18s %-8s %-5s | %-10s %-10s\n",
                "Benchmark", "Approach", "Mean", "Std Dev", "Wins", "Mean", "Std Dev", "Wins", "PG",
                "PI");
  os << line;
  for (const SummaryRow& s : report.summary) {
    char pg_std[32], pi_std[32];
    std::snprintf(pg_std, sizeof(pg_std), "%.4f", s.pg_std);
    std::snprintf(pi_std, sizeof(pi_std), "%.3f", s.pi_std);
    std::snprintf(line, sizeof(line),
                  "%-12s %-10s | %-18s %-8s %-5d | %-18s %-8s %-5d | %-10s %-10s\n",
                  report.benchmark.c_str(), s.approach.c_str(),
                  mean_cell(s.pg_mean, s.pg_improvement, "%.4f").c_str(), pg_std, s.pg_wins,
                  mean_cell(s.pi_mean, s.pi_improvement, "%.3f").c_str(), pi_std, s.pi_wins,
                  p_cell(s.pg_p).c_str(), p_cell(s.pi_p).c_str());
    os << line;
  }
  os << "Improvements are relative to " << report.baseline << ". Horizon " << report.horizon
     << " s.\n";
  if (!report.missing.empty()) {
    os << "Missing runs:";
    for (const std::string& m : report.missing) os << " " << m;
    os << "\n";
  }
  return os.str();
}

}  // namespace idpas
