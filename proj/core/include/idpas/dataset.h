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

#ifndef IDPAS_DATASET_H_
#define IDPAS_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "idpas/branch_and_bound.h"
#include "idpas/mip.h"

namespace idpas {

enum class Split { kTrain, kValidation, kTest };

std::string_view ToString(Split split);
Split ParseSplit(std::string_view text);

// Binarized solution pool of one instance. Labels are over IntegerIndices
// order; label vectors are distinct and sorted by ascending objective.
struct TrainingSample {
  std::string instance_ref;
  std::uint64_t instance_hash = 0;
  int num_integer = 0;
  int u_p = 0;
  std::vector<std::vector<std::uint8_t>> labels;
  std::vector<double> objectives;

  friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

// 1 for integer variables that may be fixed to zero (0 in [lb, ub]); others
// always carry label 1 and are never X0 candidates. IntegerIndices order.
std::vector<std::uint8_t> ZeroCandidates(const MipInstance& inst);

// Builds a sample from a solution pool. Solutions must be sorted by
// objective; label vectors that repeat an earlier one are dropped.
TrainingSample MakeSample(const MipInstance& inst, std::string instance_ref,
                          int u_p, const std::vector<Solution>& pool,
                          double label_tol = kDefaultIntegralityTol);

// Binary sample file:
//   "IDPS" | u32 version | u32 |I| | u32 u_p | u32 count | u64 instance hash
//   | count rows of ceil(|I|/8) bytes (bit i of byte i/8 is label i, LSB
//   first) | count float64 objectives. All integers little-endian.
std::string EncodeSample(const TrainingSample& sample);
TrainingSample DecodeSample(std::string_view bytes, std::string instance_ref = "");

// Solution file linked to a sample by instance hash (JSON).
std::string EncodeSolutions(std::uint64_t instance_hash,
                            const std::vector<Solution>& solutions);
std::vector<Solution> DecodeSolutions(std::string_view text,
                                      std::uint64_t expected_hash);

// Re-checks that every stored solution is feasible at `tol` and that the
// sample's labels are exactly the deduplicated binarizations. Throws
// ValidationError naming the first mismatch.
void VerifySample(const MipInstance& inst, const TrainingSample& sample,
                  const std::vector<Solution>& solutions, double tol);

struct CollectOptions {
  int u_p = 50;
  SolverConfig solver;
  double label_tol = kDefaultIntegralityTol;
  int jobs = 1;
};

struct CollectedInstance {
  std::string instance_ref;
  TrainingSample sample;
  std::vector<Solution> solutions;  // solutions kept for the labels
  SolveStatus status = SolveStatus::kTimeLimit;
};

struct CollectResult {
  std::vector<CollectedInstance> kept;
  std::vector<std::string> excluded;  // refs of instances with no solution
};

struct NamedInstance {
  std::string ref;
  MipInstance instance;
};

// Solves every instance in pool mode and binarizes the pools. Instances with
// no feasible solution are listed in `excluded` (and a warning goes to
// stderr). Throws ConfigError on empty input.
CollectResult CollectDataset(const std::vector<NamedInstance>& instances,
                             const CollectOptions& options);

struct LabelStatistics {
  std::vector<double> zero_frequency;  // per integer variable
  double zero_fraction = 0.0;          // over all labels
  std::int64_t label_vectors = 0;
};

// Throws ConfigError if `samples` is empty or |I| differs across samples.
LabelStatistics ComputeLabelStatistics(const std::vector<TrainingSample>& samples);

struct ManifestEntry {
  std::string instance;   // instance file, relative to the manifest
  std::string sample;     // sample file, relative to the manifest
  std::string solutions;  // solution file, relative to the manifest
  std::uint64_t instance_hash = 0;
  int num_labels = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string family;
  Split split = Split::kTrain;
  int u_p = 0;
  double time_limit = 0.0;
  std::int64_t node_limit = 0;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> excluded;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string SerializeManifest(const DatasetManifest& manifest);
DatasetManifest ParseManifest(std::string_view text);

// Writes one .labels and one .sol.json file per kept instance next to
// `manifest_path`, then the manifest itself, all atomically. Instance refs
// are recorded as given and resolved relative to the manifest on load.
DatasetManifest WriteDataset(const std::filesystem::path& manifest_path,
                             const std::string& family, Split split,
                             const CollectResult& result,
                             const CollectOptions& options);

struct LoadedSample {
  MipInstance instance;
  TrainingSample sample;
};

// Loads instances and samples listed in a manifest; checks instance hashes.
std::vector<LoadedSample> LoadDataset(const std::filesystem::path& manifest_path);

}  // namespace idpas

#endif  // IDPAS_DATASET_H_
