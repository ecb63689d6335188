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

#ifndef IDPAS_RUN_CONFIG_H_
#define IDPAS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "idpas/instance_gen.h"

namespace idpas {

// Everything one pipeline run needs. Every field has a default; a config
// file overrides any subset.
struct RunConfig {
  FamilyConfig family;
  int train = 60;
  int validation = 20;
  int test = 20;
  int u_p = 50;
  double collect_time = 5.0;
  std::int64_t collect_nodes = 10'000'000;
  double tune_time = 5.0;
  double test_time = 10.0;
  double reference_time = 60.0;  // <= 0 skips the reference solve
  int hidden = 16;
  int heads = 4;
  int batch_size = 16;
  std::int64_t max_steps = 2000;
  double lr = 1e-3;
  std::vector<int> deltas = {1, 5, 10};
  std::vector<int> k0_percents = {50, 60, 70, 80, 90};
  // "plain", "pas" (model without identity bits) and "id-pas" (model with
  // family.identity_bits); the first entry is the report baseline.
  std::vector<std::string> approaches = {"plain", "pas", "id-pas"};
  // Neighborhood used by the "pas" approach.
  std::string pas_variant = "id-pas";
  int pas_k1_percent = 0;
  std::string out = "idpas_run";
  std::uint64_t seed = 0;

  // Throws ConfigError on out-of-range values.
  void Validate() const;
};

// JSON object; unknown keys are rejected with ConfigError.
RunConfig ParseRunConfig(std::string_view text);
std::string SerializeRunConfig(const RunConfig& cfg);
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace idpas

#endif  // IDPAS_RUN_CONFIG_H_
