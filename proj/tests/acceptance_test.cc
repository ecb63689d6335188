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

// Acceptance suite: one PASS/FAIL line per criterion on stdout. Usage:
//   idpas_acceptance [--workdir DIR] [--only N] [--jobs J]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "idpas/branch_and_bound.h"
#include "idpas/errors.h"
#include "idpas/eval.h"
#include "idpas/gat_model.h"
#include "idpas/graph_encode.h"
#include "idpas/mip.h"
#include "idpas/pas_search.h"
#include "idpas/pipeline.h"
#include "idpas/rng.h"
#include "idpas/run_config.h"
#include "idpas/testing/oracles.h"
#include "idpas/testing/reference_gat.h"
#include "json.hpp"

namespace idpas {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

SolverConfig Exhaustive() {
  SolverConfig cfg;
  cfg.time_limit = 1e9;
  cfg.node_limit = 20'000'000;
  return cfg;
}

// 1. Solver objective equals exhaustive enumeration on 50 instances.
Outcome SolverCorrectness() {
  Timer timer;
  int exact = 0, total = 0, infeasible = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 6 + static_cast<int>(seed % 7);  // 6..12 integer variables
    const MipInstance inst = testing::RandomOracleInstance(10'000 + seed, n, 3, 6);
    const auto opt = testing::EnumerateOptimum(inst);
    const SolveResult r = SolveMip(inst, Exhaustive());
    ++total;
    if (!opt) {
      ++infeasible;
      exact += r.status == SolveStatus::kInfeasible;
    } else {
      exact += r.status == SolveStatus::kOptimal && r.best_solution &&
               std::abs(r.best_solution->objective - opt->objective) <= 1e-6;
    }
  }
  const double secs = timer.Seconds();
  return {exact == total && secs < 60.0,
          std::to_string(exact) + "/" + std::to_string(total) + " match enumeration (" +
              std::to_string(infeasible) + " infeasible), " + Fmt("%.1f", secs) +
              " s (limit 60 s)"};
}

// 2. Analytic gradient against central differences of an independent
// long-double forward pass.
Outcome GradientFidelity() {
  Timer timer;
  MipInstance inst;
  Rng rng(42);
  for (int j = 0; j < 5; ++j) {
    inst.AddVariable("x" + std::to_string(j), VarKind::kGeneralInteger, 0,
                     1 + static_cast<double>(rng.UniformInt(3)), rng.Uniform(-2, 2));
  }
  for (int r = 0; r < 3; ++r) {
    std::vector<Term> terms;
    for (int j = 0; j < 5; ++j) {
      if (rng.Uniform() < 0.7 || j == r) terms.push_back({j, rng.Uniform(-3, 3)});
    }
    inst.AddRow(std::move(terms), static_cast<RowSense>(r % 3), rng.Uniform(-2, 4));
  }
  const BipartiteGraph g = EncodeBipartite(inst);
  GatDims dims;
  dims.hidden = 4;
  dims.heads = 2;
  const GatParams params = InitParams(dims, 7);
  TrainingSample s;
  s.num_integer = 5;
  s.labels = {{1, 0, 0, 1, 0}, {1, 1, 0, 0, 0}, {0, 0, 0, 1, 1}};
  const GatParams grad = Gradient(params, g, s);
  double worst = 0.0;
  int checked = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double a = grad.data()[k];
    if (std::abs(a) <= 1e-8) continue;
    const double fd = testing::ReferenceFiniteDifference(params, g, s, k, 1e-4);
    worst = std::max(worst, std::abs(a - fd) / std::abs(a));
    ++checked;
  }
  const double secs = timer.Seconds();
  return {worst < 1e-4 && secs < 30.0,
          std::to_string(checked) + " of " + std::to_string(params.size()) +
              " coordinates checked, worst relative error " + Fmt("%.2e", worst) +
              " (limit 1e-4), " + Fmt("%.1f", secs) + " s"};
}

// Instance A and its relabeling B (variables 0<->1 and 2<->3 swapped).
std::pair<MipInstance, MipInstance> TwinInstances() {
  MipInstance a;
  const double c[4] = {1, 2, 3, 4};
  for (int j = 0; j < 4; ++j) {
    a.AddVariable("v" + std::to_string(j), VarKind::kGeneralInteger, 0, 3, c[j]);
  }
  a.AddRow({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, RowSense::kGe, 2.0);
  a.AddRow({{0, 2.0}, {2, 1.0}}, RowSense::kLe, 5.0);
  const int perm[4] = {1, 0, 3, 2};
  MipInstance b = a;
  for (int j = 0; j < 4; ++j) {
    b.objective[perm[j]] = a.objective[j];
    b.var_names[perm[j]] = a.var_names[j];
  }
  for (Row& row : b.rows) {
    for (Term& t : row.terms) t.var = perm[t.var];
  }
  return {a, b};
}

// 3. Identity bits separate variables that base features cannot.
Outcome IdentitySeparation() {
  Timer timer;
  const auto [a, b] = TwinInstances();
  const int perm[4] = {1, 0, 3, 2};
  TrainingSample s;
  s.num_integer = 4;
  s.labels = {{1, 0, 1, 0}};
  const double floor_bce = 0.6 * 4 * std::log(2.0);

  // Without identity bits.
  const BipartiteGraph ga = EncodeBipartite(a), gb = EncodeBipartite(b);
  GatDims plain;
  plain.hidden = 16;
  plain.heads = 4;
  const GatParams p0 = InitParams(plain, 3);
  const Prediction pa = Forward(p0, ga), pb = Forward(p0, gb);
  double max_diff = 0.0;
  for (int j = 0; j < 4; ++j) {
    max_diff = std::max(max_diff, std::abs(pa.scores[j] - pb.scores[perm[j]]));
  }
  TrainConfig tc;
  tc.batch_size = 2;
  tc.max_steps = 2000;
  tc.seed = 5;
  const std::vector<TrainExample> plain_set = {{ga, s}, {gb, s}};
  const TrainResult r0 = Train(plain_set, plain_set, plain, tc);
  const double plain_bce = MeanLoss(r0.best, plain_set);

  // With 4 identity bits.
  const BipartiteGraph ia = AppendIdentity(ga, 4), ib = AppendIdentity(gb, 4);
  GatDims ident = plain;
  ident.identity_bits = 4;
  ident.var_in = kVarFeatures + 4;
  const std::vector<TrainExample> id_set = {{ia, s}, {ib, s}};
  const TrainResult r1 = Train(id_set, id_set, ident, tc);
  const double id_bce = MeanLoss(r1.best, id_set);
  const double secs = timer.Seconds();

  const bool pass = max_diff <= 1e-6 && plain_bce >= floor_bce &&
                    id_bce < 0.1 * r1.initial_train_loss && secs < 300.0;
  return {pass, "no-identity max score diff " + Fmt("%.1e", max_diff) + " (<= 1e-6), BCE " +
                    Fmt("%.4f", plain_bce) + " (floor " + Fmt("%.4f", floor_bce) +
                    "); identity BCE " + Fmt("%.4f", id_bce) + " vs initial " +
                    Fmt("%.4f", r1.initial_train_loss) + " (< 0.1x), " + Fmt("%.1f", secs) +
                    " s"};
}

// 4. Neighborhood soundness, radius equivalence, oracle fixing, monotonicity.
Outcome NeighborhoodProperties() {
  Timer timer;
  int unsound = 0, full_mismatch = 0, oracle_mismatch = 0, non_monotone = 0, used = 0;
  int incumbents = 0;
  for (std::uint64_t seed = 0; used < 20; ++seed) {
    const MipInstance inst = testing::RandomOracleInstance(20'000 + seed, 9);
    const auto opt = testing::EnumerateOptimum(inst);
    if (!opt) continue;
    ++used;
    const BipartiteGraph g = AppendIdentity(EncodeBipartite(inst), 4);
    GatDims dims;
    dims.hidden = 8;
    dims.heads = 2;
    dims.identity_bits = 4;
    dims.var_in = kVarFeatures + 4;
    const GatParams model = InitParams(dims, seed);
    const int eligible = static_cast<int>(EligibleZeroIndices(inst).size());

    // (a) + (d): every pooled incumbent feasible; optimum non-increasing.
    SolverConfig pooled = Exhaustive();
    pooled.pool_capacity = 1000;
    std::optional<double> prev;
    for (int delta = 0; delta <= eligible; ++delta) {
      PasOptions o;
      o.k0 = eligible;
      o.delta = delta;
      const PasResult pool_run = RunPas(inst, model, o, pooled);
      for (const Solution& sol : pool_run.result.pool) {
        ++incumbents;
        unsound += sol.values.size() != static_cast<std::size_t>(inst.num_vars()) ||
                   !CheckFeasibility(inst, sol.values, 1e-6).feasible;
      }
      const PasResult r = RunPas(inst, model, o, Exhaustive());
      if (!r.result.best_solution) {
        non_monotone += prev.has_value();
        continue;
      }
      const double v = r.result.best_solution->objective;
      if (prev && v > *prev + 1e-6) ++non_monotone;
      prev = v;
      // (b) delta = |X0|.
      if (delta == eligible && std::abs(v - opt->objective) > 1e-6) ++full_mismatch;
    }
    if (!prev) ++full_mismatch;

    // (c) oracle X0 = true zero set, delta = 0.
    Prediction oracle;
    oracle.valid.assign(inst.num_vars(), 1);
    int zeros = 0;
    for (int j = 0; j < inst.num_vars(); ++j) {
      oracle.scores.push_back(opt->x[j] == 0.0 ? 0.0 : 1.0);
      zeros += opt->x[j] == 0.0 && inst.lower[j] <= 0.0;
    }
    PasOptions o;
    o.k0 = zeros;
    o.delta = 0;
    const PasResult r = SolveWithPrediction(inst, oracle, o, Exhaustive());
    if (!r.result.best_solution ||
        std::abs(r.result.best_solution->objective - opt->objective) > 1e-6) {
      ++oracle_mismatch;
    }
  }
  const double secs = timer.Seconds();
  const bool pass = unsound == 0 && full_mismatch == 0 && oracle_mismatch == 0 && non_monotone == 0;
  return {pass, "20 instances: (a) " + std::to_string(unsound) + " infeasible of " +
                    std::to_string(incumbents) + " incumbents, (b) " +
                    std::to_string(full_mismatch) + " full-radius mismatches, (c) " +
                    std::to_string(oracle_mismatch) + " oracle-X0 mismatches, (d) " +
                    std::to_string(non_monotone) + " monotonicity violations, " +
                    Fmt("%.1f", secs) + " s"};
}

// 5. Metric hand examples and Wilcoxon checks.
Outcome MetricCorrectness() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  check(PrimalGap(100.0, 100.0) == 0.0, "PG(100,100)");
  check(PrimalGap(0.5, 0.0) == 1.0 && PrimalGapRaw(0.5, 0.0) == 0.5 / 1e-8, "PG eps rule");
  check(std::abs(PrimalGap(103.0, 100.0) - 0.03) < 1e-15, "PG(103,100)");
  check(PrimalIntegral({}, 1.0, 10.0) == 10.0, "PI empty");
  const std::vector<Incumbent> t0 = {{0.0, 5.0}};
  check(PrimalIntegral(t0, 5.0, 10.0) == 0.0, "PI at zero");
  const std::vector<Incumbent> t2 = {{2.0, 150.0}};
  check(PrimalIntegral(t2, 100.0, 10.0) == 6.0, "PI step");

  Rng rng(555);
  int monotone_violations = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<Incumbent> trace;
    double t = 0.0, v = 200.0;
    const int len = static_cast<int>(rng.UniformInt(8));
    for (int i = 0; i < len; ++i) {
      t += rng.Uniform(0.0, 3.0);
      v -= rng.Uniform(0.0, 30.0);
      trace.push_back({t, v});
    }
    const double v_star = v - rng.Uniform(0.0, 20.0);
    double prev = 0.0;
    for (double T = 0.25; T <= 20.0; T += 0.25) {
      const double pi = PrimalIntegral(trace, v_star, T);
      if (pi < prev || pi > T) ++monotone_violations;
      prev = pi;
    }
  }
  check(monotone_violations == 0, "PI monotone");

  const std::vector<double> pos = {2, 3, 4, 5, 6}, zero = {0.5, 0.5, 0.5, 0.5, 0.5};
  const double p5 = WilcoxonSignedRank(pos, zero).p_value;
  check(p5 == 0.0625, "Wilcoxon n=5");

  // 30 shifted pairs; exact vs approximation on both 15-pair halves.
  Rng pairs(99);
  std::vector<double> x(30), y(30);
  for (int k = 0; k < 30; ++k) {
    y[k] = pairs.Normal(0.0, 1.0);
    x[k] = y[k] + pairs.Normal(0.3, 1.0);
  }
  double worst = 0.0;
  for (int start : {0, 15}) {
    std::span<const double> sx(x.data() + start, 15), sy(y.data() + start, 15);
    worst = std::max(worst, std::abs(WilcoxonSignedRank(sx, sy, WilcoxonMethod::kExact).p_value -
                                     WilcoxonSignedRank(sx, sy, WilcoxonMethod::kNormal).p_value));
  }
  check(worst < 0.01, "Wilcoxon exact vs normal");

  std::string detail = "PG/PI examples exact, PI monotone on 100 traces (" +
                       std::to_string(monotone_violations) + " violations), Wilcoxon n=5 p=" +
                       Fmt("%.4f", p5) + ", n=15 exact-vs-normal " + Fmt("%.5f", worst) +
                       " (< 0.01)";
  for (const std::string& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

std::string ReadAll(const fs::path& p) { return ReadFile(p); }

// Shared desk-scale pipeline run for criteria 6 and 7.
RunConfig DeskConfig(const fs::path& workdir) {
  RunConfig cfg;  // 60/20/20, u_p = 50, 10 s test budget
  cfg.collect_time = 3.0;
  cfg.tune_time = 3.0;
  cfg.reference_time = 30.0;
  cfg.out = (workdir / "desk").string();
  cfg.seed = 1;
  return cfg;
}

// 6. End-to-end directional result.
Outcome EndToEnd(const fs::path& workdir, int jobs) {
  Timer timer;
  const RunConfig cfg = DeskConfig(workdir);
  RunGen(cfg, std::cerr);
  RunCollect(cfg, jobs, std::cerr);
  RunTrain(cfg, std::cerr);
  RunTune(cfg, jobs, std::cerr);
  const Report rep = RunEval(cfg, jobs, std::cerr);
  const double secs = timer.Seconds();
  const SummaryRow* plain = nullptr;
  const SummaryRow* id = nullptr;
  for (const SummaryRow& s : rep.summary) {
    if (s.approach == "plain") plain = &s;
    if (s.approach == "id-pas") id = &s;
  }
  if (!plain || !id) return {false, "report lacks plain or id-pas rows"};
  // Per-instance PG wins of ID-PaS against Plain alone.
  std::map<std::string, double> plain_pg;
  for (const MetricsRecord& m : rep.metrics) {
    if (m.approach == "plain") plain_pg[m.instance] = m.pg;
  }
  int head_to_head = 0, n = 0;
  for (const MetricsRecord& m : rep.metrics) {
    if (m.approach != "id-pas") continue;
    ++n;
    head_to_head += m.pg <= plain_pg[m.instance] + 1e-9;
  }
  const fs::path eval = PathsFor(cfg).eval;
  const std::string summary = ReadAll(eval / "summary.csv");
  const bool report_ok = fs::exists(eval / "summary_table.txt") && id->pg_improvement &&
                         summary.find("pg_improvement_pct") != std::string::npos &&
                         summary.find("pg_wilcoxon_p") != std::string::npos;
  const bool pass = id->pg_mean <= plain->pg_mean && 2 * head_to_head >= n && report_ok &&
                    secs < 4 * 3600.0;
  std::string p = id->pg_p ? Fmt("%.4g", *id->pg_p) : std::string("n/a");
  return {pass, "mean PG id-pas " + Fmt("%.4f", id->pg_mean) + " vs plain " +
                    Fmt("%.4f", plain->pg_mean) + " (" +
                    Fmt("%.1f", id->pg_improvement.value_or(0.0)) + "%), id-pas PG wins " +
                    std::to_string(head_to_head) + "/" + std::to_string(n) +
                    " vs plain (table wins " + std::to_string(id->pg_wins) + "), Wilcoxon p " +
                    p + ", " + Fmt("%.0f", secs) + " s (limit 14400 s)"};
}

// 7. Zero-label fraction of the training pools.
Outcome Sparsity(const fs::path& workdir, int jobs) {
  const RunConfig cfg = DeskConfig(workdir);
  const PipelinePaths paths = PathsFor(cfg);
  const fs::path stats_file = paths.datasets / "label_stats.json";
  double zero_fraction = 0.0;
  if (fs::exists(stats_file) && fs::exists(paths.DatasetManifest(Split::kTrain))) {
    zero_fraction = nlohmann::json::parse(ReadAll(stats_file)).at("zero_fraction").get<double>();
  } else {
    RunGen(cfg, std::cerr);
    zero_fraction = RunCollect(cfg, jobs, std::cerr).zero_fraction;
  }
  return {zero_fraction > 0.5,
          "MMCNP-lite training pools zero-label fraction " + Fmt("%.4f", zero_fraction) +
              " (> 0.5)"};
}

// Every file under `dir`, relative path -> contents.
std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = ReadAll(e.path());
  }
  return out;
}

// 8. Two runs of the whole pipeline under one master seed.
Outcome Determinism(const fs::path& workdir, int jobs) {
  Timer timer;
  std::vector<std::map<std::string, std::string>> snaps;
  for (const char* name : {"det_a", "det_b"}) {
    RunConfig cfg;
    cfg.train = 8;
    cfg.validation = 4;
    cfg.test = 4;
    cfg.u_p = 10;
    cfg.collect_time = 1.0;
    cfg.tune_time = 0.5;
    cfg.test_time = 1.0;
    cfg.reference_time = 2.0;
    cfg.max_steps = 40;
    cfg.deltas = {1, 5};
    cfg.k0_percents = {50, 90};
    cfg.seed = 2026;
    cfg.out = (workdir / "det" / "run").string();
    fs::remove_all(workdir / "det");
    RunGen(cfg, std::cerr);
    RunCollect(cfg, jobs, std::cerr);
    RunTrain(cfg, std::cerr);
    RunTune(cfg, jobs, std::cerr);
    RunEval(cfg, jobs, std::cerr);
    RunReport(cfg, std::cerr);
    snaps.push_back(Snapshot(cfg.out));
    fs::rename(workdir / "det", workdir / name);
  }
  int differing = 0;
  for (const auto& [file, bytes] : snaps[0]) {
    auto it = snaps[1].find(file);
    differing += it == snaps[1].end() || it->second != bytes;
  }
  differing += snaps[0].size() != snaps[1].size();
  int datasets = 0, checkpoints = 0, reports = 0;
  for (const auto& [file, bytes] : snaps[0]) {
    datasets += file.rfind("datasets/", 0) == 0;
    checkpoints += file.size() > 5 && file.substr(file.size() - 5) == ".ckpt";
    reports += file.rfind("eval/", 0) == 0;
  }
  const bool pass = differing == 0 && datasets > 0 && checkpoints > 0 && reports > 0;
  return {pass, std::to_string(snaps[0].size()) + " files (" + std::to_string(datasets) +
                    " dataset, " + std::to_string(checkpoints) + " checkpoint, " +
                    std::to_string(reports) + " report) compared, " + std::to_string(differing) +
                    " differ, " + Fmt("%.0f", timer.Seconds()) + " s"};
}

}  // namespace
}  // namespace idpas

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  fs::path workdir = fs::temp_directory_path() / "idpas_acceptance";
  int only = 0, jobs = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--jobs" && i + 1 < argc) {
      jobs = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: idpas_acceptance [--workdir DIR] [--only N] [--jobs J]\n";
      return 2;
    }
  }
  fs::create_directories(workdir);
  const std::vector<std::pair<std::string, std::function<idpas::Outcome()>>> criteria = {
      {"solver correctness", idpas::SolverCorrectness},
      {"gradient fidelity", idpas::GradientFidelity},
      {"identity-awareness separation", idpas::IdentitySeparation},
      {"neighborhood soundness and equivalence", idpas::NeighborhoodProperties},
      {"metric correctness", idpas::MetricCorrectness},
      {"end-to-end directional result", [&] { return idpas::EndToEnd(workdir, jobs); }},
      {"sparsity premise", [&] { return idpas::Sparsity(workdir, jobs); }},
      {"determinism", [&] { return idpas::Determinism(workdir, jobs); }},
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && only != static_cast<int>(k + 1)) continue;
    idpas::Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " ("
              << criteria[k].first << "): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
