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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "idpas/branch_and_bound.h"
#include "idpas/errors.h"
#include "idpas/gat_model.h"
#include "idpas/mip.h"
#include "idpas/pas_search.h"
#include "idpas/pipeline.h"
#include "idpas/run_config.h"
#include "selftest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunPasFlags {
  std::string instance;
  std::string checkpoint;
  std::string variant = "id-pas";
  std::string k0 = "70%";
  std::string k1 = "0";
  int delta = 5;
  double time = 10.0;
  std::string trace;
  std::string clock = "deterministic";
};

// "30" is an absolute count; "50%" a share of `eligible`.
int ParseCount(const std::string& text, int eligible, const char* name) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text.back() == '%') {
      const double pct = std::stod(text.substr(0, text.size() - 1), &used);
      if (used + 1 != text.size() || pct < 0 || pct > 100) throw std::invalid_argument(text);
      return static_cast<int>(std::floor(pct * eligible / 100.0));
    }
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw idpas::ConfigError(std::string("invalid --") + name + " '" + text + "'");
  }
}

int RunPasCommand(const RunPasFlags& f) {
  namespace fs = std::filesystem;
  if (!fs::exists(f.instance)) throw idpas::ConfigError("instance not found: " + f.instance);
  if (!fs::exists(f.checkpoint)) throw idpas::ConfigError("checkpoint not found: " + f.checkpoint);
  const idpas::MipInstance inst = idpas::LoadInstance(f.instance);
  const idpas::GatParams params = idpas::LoadCheckpoint(f.checkpoint);
  idpas::PasOptions opt;
  opt.variant = idpas::ParsePasVariant(f.variant);
  const int eligible = static_cast<int>(opt.variant == idpas::PasVariant::kIdPas
                                            ? idpas::EligibleZeroIndices(inst).size()
                                            : idpas::BinaryIndices(inst).size());
  opt.k0 = ParseCount(f.k0, eligible, "k0");
  opt.k1 = ParseCount(f.k1, eligible, "k1");
  opt.delta = f.delta;
  idpas::SolverConfig cfg;
  cfg.time_limit = f.time;
  if (f.clock == "wall") {
    cfg.clock = idpas::ClockMode::kWall;
  } else if (f.clock != "deterministic") {
    throw idpas::ConfigError("--clock must be deterministic or wall");
  }
  const idpas::PasResult r = idpas::RunPas(inst, params, opt, cfg);
  std::cerr << "[run-pas] " << inst.name << ": status " << idpas::ToString(r.result.status)
            << ", |X0| = " << r.spec.x0.size() << ", delta = " << r.spec.delta;
  if (r.result.best_solution) std::cerr << ", objective " << r.result.best_solution->objective;
  std::cerr << "\n";
  if (!f.trace.empty()) {
    std::string csv = "time,objective\n";
    char line[96];
    for (const idpas::Incumbent& inc : r.result.incumbents) {
      std::snprintf(line, sizeof(line), "%.10g,%.10g\n", inc.time, inc.objective);
      csv += line;
    }
    idpas::WriteFileAtomic(f.trace, csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predict-and-search pipeline for parametric integer programs"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* gen = app.add_subcommand("gen", "Generate train/validation/test instances");
  auto* collect = app.add_subcommand("collect", "Collect solution pools and labels");
  auto* train = app.add_subcommand("train", "Train the scoring models");
  auto* tune = app.add_subcommand("tune", "Grid-search (k0, delta) on validation instances");
  auto* eval = app.add_subcommand("eval", "Run every approach on the test instances");
  auto* report = app.add_subcommand("report", "Rebuild report files from evaluation runs");
  auto* selftest = app.add_subcommand("selftest", "Run the embedded oracle suites");
  auto* run_pas = app.add_subcommand("run-pas", "Solve one instance with a trained model");
  RunPasFlags f;
  run_pas->add_option("--instance", f.instance, "Instance file")->required();
  run_pas->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  run_pas->add_option("--variant", f.variant, "id-pas or binary-pas");
  run_pas->add_option("--k0", f.k0, "Count or percentage of eligible variables");
  run_pas->add_option("--k1", f.k1, "Count or percentage (binary-pas only)");
  run_pas->add_option("--delta", f.delta, "Neighborhood radius")->check(CLI::NonNegativeNumber);
  run_pas->add_option("--time", f.time, "Time budget in seconds")->check(CLI::PositiveNumber);
  run_pas->add_option("--trace", f.trace, "Incumbent trace output (CSV)");
  run_pas->add_option("--clock", f.clock, "deterministic or wall");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (selftest->parsed()) return idpas::RunSelfTest(std::cerr) ? kExitOk : kExitRuntime;
    if (run_pas->parsed()) return RunPasCommand(f);

    idpas::RunConfig cfg;
    if (!config_path.empty()) cfg = idpas::LoadRunConfig(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    cfg.Validate();
    if (gen->parsed()) idpas::RunGen(cfg, std::cerr);
    if (collect->parsed()) idpas::RunCollect(cfg, jobs, std::cerr);
    if (train->parsed()) idpas::RunTrain(cfg, std::cerr);
    if (tune->parsed()) idpas::RunTune(cfg, jobs, std::cerr);
    if (eval->parsed()) std::cout << idpas::FormatSummaryTable(idpas::RunEval(cfg, jobs, std::cerr));
    if (report->parsed()) std::cout << idpas::RunReport(cfg, std::cerr);
    return kExitOk;
  } catch (const idpas::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
