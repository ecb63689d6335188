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

#ifndef IDPAS_PIPELINE_H_
#define IDPAS_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "idpas/dataset.h"
#include "idpas/eval.h"
#include "idpas/run_config.h"

namespace idpas {

// Output layout under RunConfig::out.
struct PipelinePaths {
  std::filesystem::path root;
  std::filesystem::path instances;   // instances/manifest.json + inst_####.json
  std::filesystem::path datasets;    // train.json, validation.json, label_stats.json
  std::filesystem::path models;      // <approach>.ckpt, <approach>_curve.csv
  std::filesystem::path tune;        // <approach>_grid.csv, selection.json
  std::filesystem::path eval;        // runs.json and the report files

  std::filesystem::path InstanceManifest() const { return instances / "manifest.json"; }
  std::filesystem::path DatasetManifest(Split split) const;
  std::filesystem::path Checkpoint(const std::string& approach) const;
  std::filesystem::path Selection() const { return tune / "selection.json"; }
  std::filesystem::path Runs() const { return eval / "runs.json"; }
};

PipelinePaths PathsFor(const RunConfig& cfg);

// Identity width used by a learned approach's model.
int IdentityBitsFor(const RunConfig& cfg, const std::string& approach);

// Instances of one split, as listed by the instance manifest; refs are
// file stems.
std::vector<NamedInstance> LoadSplit(const RunConfig& cfg, Split split);

// Each phase reads the previous phases' files, overwrites its own outputs
// atomically and writes progress lines to `log`.
void RunGen(const RunConfig& cfg, std::ostream& log);
LabelStatistics RunCollect(const RunConfig& cfg, int jobs, std::ostream& log);
void RunTrain(const RunConfig& cfg, std::ostream& log);
void RunTune(const RunConfig& cfg, int jobs, std::ostream& log);
// Throws ConfigError naming the path of a missing checkpoint or selection.
Report RunEval(const RunConfig& cfg, int jobs, std::ostream& log);
// Rebuilds the report files from runs.json; returns the text table.
std::string RunReport(const RunConfig& cfg, std::ostream& log);

void WriteReportFiles(const std::filesystem::path& dir, const Report& report);

}  // namespace idpas

#endif  // IDPAS_PIPELINE_H_
