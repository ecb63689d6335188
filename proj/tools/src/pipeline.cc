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

#include "idpas/pipeline.h"

#include <cstdio>
#include <map>

#include "idpas/errors.h"
#include "idpas/gat_model.h"
#include "idpas/graph_encode.h"
#include "idpas/instance_gen.h"
#include "idpas/mip.h"
#include "idpas/pas_search.h"
#include "idpas/rng.h"
#include "json.hpp"

namespace idpas {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr Split kSplits[] = {Split::kTrain, Split::kValidation, Split::kTest};

std::string InstanceFile(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "inst_%04d.json", index);
  return buf;
}

int SplitSize(const RunConfig& cfg, Split split) {
  switch (split) {
    case Split::kTrain:
      return cfg.train;
    case Split::kValidation:
      return cfg.validation;
    case Split::kTest:
      return cfg.test;
  }
  return 0;
}

ordered_json ReadJson(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path.string());
  try {
    return ordered_json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

bool IsLearned(const std::string& approach) { return approach != "plain"; }

PasVariant VariantFor(const RunConfig& cfg, const std::string& approach) {
  return approach == "pas" ? ParsePasVariant(cfg.pas_variant) : PasVariant::kIdPas;
}

int K1PercentFor(const RunConfig& cfg, const std::string& approach) {
  return approach == "pas" ? cfg.pas_k1_percent : 0;
}

std::vector<TrainExample> Examples(const std::vector<LoadedSample>& samples, int bits) {
  std::vector<TrainExample> out;
  for (const LoadedSample& s : samples) {
    BipartiteGraph g = EncodeBipartite(s.instance);
    if (bits > 0) g = AppendIdentity(g, bits);
    out.push_back({std::move(g), s.sample});
  }
  return out;
}

GatParams LoadModel(const PipelinePaths& paths, const std::string& approach) {
  const fs::path ckpt = paths.Checkpoint(approach);
  if (!fs::exists(ckpt)) {
    throw ConfigError("missing checkpoint for " + approach + ": " + ckpt.string());
  }
  return LoadCheckpoint(ckpt);
}

// Best collected objective per instance stem of a split, if a dataset exists.
std::map<std::string, double> DatasetObjectives(const PipelinePaths& paths, Split split) {
  std::map<std::string, double> out;
  const fs::path manifest = paths.DatasetManifest(split);
  if (!fs::exists(manifest)) return out;
  const DatasetManifest m = ParseManifest(ReadFile(manifest));
  for (const ManifestEntry& e : m.entries) {
    const TrainingSample s = DecodeSample(ReadFile(paths.datasets / e.sample), e.instance);
    if (!s.objectives.empty()) out[fs::path(e.instance).stem().string()] = s.objectives.front();
  }
  return out;
}

std::string StatusText(SolveStatus s) { return std::string(ToString(s)); }

SolveStatus ParseStatus(const std::string& text) {
  for (SolveStatus s : {SolveStatus::kOptimal, SolveStatus::kFeasible, SolveStatus::kInfeasible,
                        SolveStatus::kTimeLimit}) {
    if (ToString(s) == text) return s;
  }
  throw ParseError("unknown solver status '" + text + "'");
}

}  // namespace

fs::path PipelinePaths::DatasetManifest(Split split) const {
  return datasets / (std::string(ToString(split)) + ".json");
}

fs::path PipelinePaths::Checkpoint(const std::string& approach) const {
  return models / (approach + ".ckpt");
}

PipelinePaths PathsFor(const RunConfig& cfg) {
  PipelinePaths p;
  p.root = cfg.out;
  p.instances = p.root / "instances";
  p.datasets = p.root / "datasets";
  p.models = p.root / "models";
  p.tune = p.root / "tune";
  p.eval = p.root / "eval";
  return p;
}

int IdentityBitsFor(const RunConfig& cfg, const std::string& approach) {
  return approach == "id-pas" ? cfg.family.identity_bits : 0;
}

std::vector<NamedInstance> LoadSplit(const RunConfig& cfg, Split split) {
  const PipelinePaths paths = PathsFor(cfg);
  const ordered_json j = ReadJson(paths.InstanceManifest(), "instance manifest (run gen first)");
  std::vector<NamedInstance> out;
  for (const auto& ref : j.at("splits").at(std::string(ToString(split)))) {
    const fs::path file = paths.instances / ref.get<std::string>();
    out.push_back({file.stem().string(), LoadInstance(file)});
  }
  return out;
}

void RunGen(const RunConfig& cfg, std::ostream& log) {
  const PipelinePaths paths = PathsFor(cfg);
  fs::create_directories(paths.instances);
  ordered_json manifest;
  manifest["family"] = std::string(ToString(cfg.family.family));
  manifest["seed"] = cfg.seed;
  manifest["family_config"] = ordered_json::parse(SerializeFamilyConfig(cfg.family));
  int index = 0;
  for (Split split : kSplits) {
    ordered_json refs = ordered_json::array();
    for (int k = 0; k < SplitSize(cfg, split); ++k, ++index) {
      const auto seed = static_cast<std::int64_t>(
          DeriveSeed(cfg.seed, "instance", static_cast<std::uint64_t>(index)) >> 1);
      SaveInstance(GenerateInstance(cfg.family, seed), paths.instances / InstanceFile(index));
      refs.push_back(InstanceFile(index));
    }
    manifest["splits"][std::string(ToString(split))] = refs;
    log << "[gen] " << ToString(split) << ": " << refs.size() << " instances\n";
  }
  WriteFileAtomic(paths.InstanceManifest(), manifest.dump(2) + "\n");
}

LabelStatistics RunCollect(const RunConfig& cfg, int jobs, std::ostream& log) {
  const PipelinePaths paths = PathsFor(cfg);
  fs::create_directories(paths.datasets);
  CollectOptions opt;
  opt.u_p = cfg.u_p;
  opt.solver.time_limit = cfg.collect_time;
  opt.solver.node_limit = cfg.collect_nodes;
  opt.jobs = jobs;
  std::vector<TrainingSample> train_samples;
  for (Split split : {Split::kTrain, Split::kValidation}) {
    std::vector<NamedInstance> items = LoadSplit(cfg, split);
    for (NamedInstance& item : items) item.ref = "../instances/" + item.ref + ".json";
    const CollectResult result = CollectDataset(items, opt);
    WriteDataset(paths.DatasetManifest(split), std::string(ToString(cfg.family.family)), split,
                 result, opt);
    log << "[collect] " << ToString(split) << ": " << result.kept.size() << " kept, "
        << result.excluded.size() << " excluded\n";
    if (split == Split::kTrain) {
      for (const CollectedInstance& c : result.kept) train_samples.push_back(c.sample);
    }
  }
  if (train_samples.empty()) throw ValidationError("no training instance has a solution");
  const LabelStatistics stats = ComputeLabelStatistics(train_samples);
  ordered_json j;
  j["split"] = "train";
  j["label_vectors"] = stats.label_vectors;
  j["zero_fraction"] = stats.zero_fraction;
  j["zero_frequency"] = stats.zero_frequency;
  WriteFileAtomic(paths.datasets / "label_stats.json", j.dump(2) + "\n");
  log << "[collect] train zero-label fraction " << stats.zero_fraction << "\n";
  return stats;
}

void RunTrain(const RunConfig& cfg, std::ostream& log) {
  const PipelinePaths paths = PathsFor(cfg);
  fs::create_directories(paths.models);
  const std::vector<LoadedSample> train = LoadDataset(paths.DatasetManifest(Split::kTrain));
  const std::vector<LoadedSample> val = LoadDataset(paths.DatasetManifest(Split::kValidation));
  for (std::size_t a = 0; a < cfg.approaches.size(); ++a) {
    const std::string& approach = cfg.approaches[a];
    if (!IsLearned(approach)) continue;
    const int bits = IdentityBitsFor(cfg, approach);
    const std::vector<TrainExample> tr = Examples(train, bits);
    const std::vector<TrainExample> va = Examples(val, bits);
    GatDims dims;
    dims.hidden = cfg.hidden;
    dims.heads = cfg.heads;
    dims.identity_bits = bits;
    dims.var_in = kVarFeatures + bits;
    TrainConfig tc;
    tc.batch_size = cfg.batch_size;
    tc.max_steps = cfg.max_steps;
    tc.lr = cfg.lr;
    tc.seed = DeriveSeed(cfg.seed, "train", a);
    log << "[train] " << approach << ": " << tr.size() << " train, " << va.size()
        << " validation, " << ParameterCount(dims) << " parameters\n";
    const TrainResult r = Train(tr, va, dims, tc);
    SaveCheckpoint(paths.Checkpoint(approach), r.best, r.state);
    WriteFileAtomic(paths.models / (approach + "_curve.csv"), CurveCsv(r.curve));
    log << "[train] " << approach << ": loss " << r.initial_train_loss << " -> best validation "
        << r.best_val_loss << " at step " << r.best_step << "\n";
  }
}

void RunTune(const RunConfig& cfg, int jobs, std::ostream& log) {
  const PipelinePaths paths = PathsFor(cfg);
  fs::create_directories(paths.tune);
  const std::vector<NamedInstance> val = LoadSplit(cfg, Split::kValidation);
  const std::map<std::string, double> known = DatasetObjectives(paths, Split::kValidation);
  std::vector<std::optional<double>> reference;
  for (const NamedInstance& n : val) {
    auto it = known.find(n.ref);
    reference.push_back(it == known.end() ? std::nullopt : std::optional<double>(it->second));
  }
  SolverConfig solver;
  solver.time_limit = cfg.tune_time;
  ordered_json selection = ordered_json::object();
  for (const std::string& approach : cfg.approaches) {
    if (!IsLearned(approach)) continue;
    const GatParams model = LoadModel(paths, approach);
    log << "[tune] " << approach << ": " << cfg.deltas.size() * cfg.k0_percents.size()
        << " pairs on " << val.size() << " instances\n";
    const GridResult grid =
        GridSearch(val, model, VariantFor(cfg, approach), cfg.deltas, cfg.k0_percents, solver,
                   reference, jobs, K1PercentFor(cfg, approach));
    WriteFileAtomic(paths.tune / (approach + "_grid.csv"), GridCsv(grid));
    const GridPoint& best = grid.points[grid.selected];
    selection[approach] = {{"delta", best.delta},
                           {"k0_percent", best.k0_percent},
                           {"mean_pg", best.mean_pg},
                           {"mean_pi", best.mean_pi}};
    log << "[tune] " << approach << ": selected delta " << best.delta << ", k0 "
        << best.k0_percent << "% (mean PI " << best.mean_pi << ")\n";
  }
  WriteFileAtomic(paths.Selection(), selection.dump(2) + "\n");
}

Report RunEval(const RunConfig& cfg, int jobs, std::ostream& log) {
  const PipelinePaths paths = PathsFor(cfg);
  std::vector<ApproachSpec> specs;
  std::optional<ordered_json> selection;
  for (const std::string& approach : cfg.approaches) {
    ApproachSpec spec;
    spec.name = approach;
    if (IsLearned(approach)) {
      spec.model = LoadModel(paths, approach);
      if (!selection) selection = ReadJson(paths.Selection(), "tuning selection (run tune first)");
      if (!selection->contains(approach)) {
        throw ConfigError("no tuned (k0, delta) for " + approach + " in " +
                          paths.Selection().string());
      }
      spec.variant = VariantFor(cfg, approach);
      spec.k0_percent = selection->at(approach).at("k0_percent").get<int>();
      spec.delta = selection->at(approach).at("delta").get<int>();
      spec.k1_percent = K1PercentFor(cfg, approach);
    }
    specs.push_back(std::move(spec));
  }
  const std::vector<NamedInstance> tests = LoadSplit(cfg, Split::kTest);
  SuiteOptions opt;
  opt.benchmark = std::string(ToString(cfg.family.family));
  opt.solver.time_limit = cfg.test_time;
  opt.reference_time_limit = cfg.reference_time;
  opt.jobs = jobs;
  log << "[eval] " << specs.size() << " approaches on " << tests.size() << " test instances\n";
  const SuiteOutput out = EvaluateSuite(tests, specs, opt);

  ordered_json j;
  j["benchmark"] = out.report.benchmark;
  j["baseline"] = out.report.baseline;
  j["horizon"] = out.report.horizon;
  j["approaches"] = cfg.approaches;
  ordered_json names = ordered_json::array(), refs = ordered_json::array();
  for (std::size_t i = 0; i < tests.size(); ++i) {
    names.push_back(tests[i].ref);
    refs.push_back(out.reference[i] ? ordered_json(*out.reference[i]) : ordered_json());
  }
  j["instances"] = names;
  j["reference"] = refs;
  ordered_json runs = ordered_json::array();
  for (const RunRecord& r : out.runs) {
    ordered_json trace = ordered_json::array();
    for (const Incumbent& inc : r.trace) trace.push_back({inc.time, inc.objective});
    runs.push_back({{"instance", r.instance},
                    {"approach", r.approach},
                    {"status", StatusText(r.status)},
                    {"final_objective",
                     r.final_objective ? ordered_json(*r.final_objective) : ordered_json()},
                    {"trace", trace}});
  }
  j["runs"] = runs;
  fs::create_directories(paths.eval);
  WriteFileAtomic(paths.Runs(), j.dump(1) + "\n");
  WriteReportFiles(paths.eval, out.report);
  log << "[eval] wrote " << paths.eval.string() << "\n";
  return out.report;
}

void WriteReportFiles(const fs::path& dir, const Report& report) {
  fs::create_directories(dir);
  WriteFileAtomic(dir / "metrics.csv", MetricsCsv(report));
  WriteFileAtomic(dir / "summary.csv", SummaryCsv(report));
  WriteFileAtomic(dir / "curves.csv", CurvesCsv(report));
  WriteFileAtomic(dir / "report_manifest.json", ReportManifest(report));
  WriteFileAtomic(dir / "summary_table.txt", FormatSummaryTable(report));
}

std::string RunReport(const RunConfig& cfg, std::ostream& log) {
  const PipelinePaths paths = PathsFor(cfg);
  const ordered_json j = ReadJson(paths.Runs(), "evaluation runs (run eval first)");
  std::vector<RunRecord> runs;
  for (const auto& r : j.at("runs")) {
    RunRecord rec;
    rec.instance = r.at("instance").get<std::string>();
    rec.approach = r.at("approach").get<std::string>();
    rec.status = ParseStatus(r.at("status").get<std::string>());
    if (!r.at("final_objective").is_null()) {
      rec.final_objective = r.at("final_objective").get<double>();
    }
    for (const auto& inc : r.at("trace")) {
      rec.trace.push_back({inc.at(0).get<double>(), inc.at(1).get<double>()});
    }
    runs.push_back(std::move(rec));
  }
  std::vector<std::optional<double>> reference;
  for (const auto& v : j.at("reference")) {
    reference.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  const Report report = BuildReport(
      j.at("benchmark").get<std::string>(), j.at("instances").get<std::vector<std::string>>(),
      j.at("approaches").get<std::vector<std::string>>(), j.at("baseline").get<std::string>(),
      runs, reference, j.at("horizon").get<double>());
  WriteReportFiles(paths.eval, report);
  log << "[report] wrote " << paths.eval.string() << "\n";
  return FormatSummaryTable(report);
}

}  // namespace idpas
