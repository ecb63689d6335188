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

#ifndef IDPAS_EVAL_H_
#define IDPAS_EVAL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idpas/branch_and_bound.h"
#include "idpas/dataset.h"
#include "idpas/gat_model.h"
#include "idpas/pas_search.h"

namespace idpas {

inline constexpr double kGapEpsilon = 1e-8;
inline constexpr int kCurvePoints = 64;

// |v - v*| / max(|v*|, eps). Returns 1.0 when `v` is missing or v * v* < 0.
double PrimalGapRaw(std::optional<double> v, double v_star);
// PrimalGapRaw capped at 1.
double PrimalGap(std::optional<double> v, double v_star);

// Capped gap of the latest incumbent with time <= t; 1 before the first.
double GapAt(std::span<const Incumbent> trace, double v_star, double t);

// Exact integral over [0, horizon] of the capped step gap. Incumbents after
// the horizon are ignored. Throws ConfigError on a non-positive horizon or
// on times that are negative or decreasing.
double PrimalIntegral(std::span<const Incumbent> trace, double v_star, double horizon);

enum class WilcoxonMethod { kAuto, kExact, kNormal };

struct WilcoxonResult {
  double p_value = 1.0;   // two-sided
  double w_plus = 0.0;    // sum of mid-ranks of positive differences
  int n = 0;              // nonzero differences
  bool exact = true;
  bool all_zero = false;  // every difference was zero; p = 1
};

// Signed-rank test on a - b with zero differences dropped and mid-ranks for
// ties. kAuto uses the exact null distribution for n <= 20 and the normal
// approximation with continuity and tie correction above. Throws
// ConfigError on unequal lengths or when 1 <= n < 5.
WilcoxonResult WilcoxonSignedRank(std::span<const double> a, std::span<const double> b,
                                  WilcoxonMethod method = WilcoxonMethod::kAuto);

// floor(percent * eligible / 100), at least 1.
int K0FromPercent(int percent, int eligible);

struct GridPoint {
  int delta = 0;
  int k0_percent = 0;
  double mean_pg = 0.0;
  double mean_pi = 0.0;
  int infeasible = 0;  // instances whose sub-MIP was proven infeasible
};

struct GridResult {
  std::vector<GridPoint> points;  // delta-major, in the order given
  std::size_t selected = 0;
};

// Index of the point with the smallest mean PI; ties by mean PG, then
// smaller k0 percentage, then smaller delta.
std::size_t SelectGridPoint(const std::vector<GridPoint>& points);

// Runs RunPas for every (delta, k0 percentage) pair on every instance.
// v* per instance is the best final objective over the grid and the
// optional `reference` value. `k1_percent` applies to BinaryPaS only.
GridResult GridSearch(const std::vector<NamedInstance>& instances, const GatParams& model,
                      PasVariant variant, const std::vector<int>& deltas,
                      const std::vector<int>& k0_percents, const SolverConfig& cfg,
                      const std::vector<std::optional<double>>& reference, int jobs,
                      int k1_percent = 0);

// k0 and k1 counts for `inst` from percentages of the variant's eligible
// set.
PasOptions OptionsFromPercent(const MipInstance& inst, PasVariant variant, int k0_percent,
                              int k1_percent, int delta);

std::string GridCsv(const GridResult& grid);

struct RunRecord {
  std::string instance;
  std::string approach;
  SolveStatus status = SolveStatus::kTimeLimit;
  std::vector<Incumbent> trace;
  std::optional<double> final_objective;
};

struct MetricsRecord {
  std::string instance;
  std::string approach;
  SolveStatus status = SolveStatus::kTimeLimit;
  double pg = 1.0;      // capped
  double pg_raw = 1.0;  // uncapped
  double pi = 0.0;
  std::optional<double> final_objective;
  std::optional<double> v_star;
};

struct SummaryRow {
  std::string approach;
  int runs = 0;
  double pg_mean = 0.0, pg_std = 0.0;
  double pi_mean = 0.0, pi_std = 0.0;
  int pg_wins = 0, pi_wins = 0;
  // Relative reduction of the mean versus the baseline, in percent.
  std::optional<double> pg_improvement, pi_improvement;
  // Paired test against the baseline on instances both completed.
  std::optional<double> pg_p, pi_p;
};

struct CurveTable {
  std::vector<double> times;  // kCurvePoints values over [0, horizon]
  std::vector<std::string> approaches;
  std::vector<std::vector<double>> mean_gap;  // [approach][time]
};

struct Report {
  std::string benchmark;
  std::string baseline;
  double horizon = 0.0;
  std::vector<MetricsRecord> metrics;  // instance-major, approaches in order
  std::vector<SummaryRow> summary;
  CurveTable curves;
  std::vector<std::string> missing;  // "instance/approach" without a run
};

// Aggregates runs. v* per instance is the best final objective over all
// runs and `reference` (parallel to `instances`). Wins: every approach
// attaining the best value (within 1e-9) on an instance gets one.
Report BuildReport(const std::string& benchmark, const std::vector<std::string>& instances,
                   const std::vector<std::string>& approaches, const std::string& baseline,
                   const std::vector<RunRecord>& runs,
                   const std::vector<std::optional<double>>& reference, double horizon);

struct ApproachSpec {
  std::string name;
  std::optional<GatParams> model;  // empty: plain solve
  PasVariant variant = PasVariant::kIdPas;
  int k0_percent = 0;
  int k1_percent = 0;
  int delta = 0;
};

struct SuiteOptions {
  std::string benchmark;
  SolverConfig solver;
  // Time limit of the per-instance reference solve; <= 0 skips it.
  double reference_time_limit = 0.0;
  int jobs = 1;
};

struct SuiteOutput {
  Report report;
  std::vector<RunRecord> runs;
  std::vector<std::optional<double>> reference;
};

// Runs every approach on every instance; the first approach is the
// baseline.
SuiteOutput EvaluateSuite(const std::vector<NamedInstance>& instances,
                          const std::vector<ApproachSpec>& approaches,
                          const SuiteOptions& options);

std::string MetricsCsv(const Report& report);
std::string SummaryCsv(const Report& report);
std::string CurvesCsv(const Report& report);
// Column documentation for every report file, as JSON.
std::string ReportManifest(const Report& report);
// Plain-text rendering of the summary in the usual results-table layout.
std::string FormatSummaryTable(const Report& report);

}  // namespace idpas

#endif  // IDPAS_EVAL_H_
