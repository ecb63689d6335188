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

#ifndef IDPAS_LP_FORMAT_H_
#define IDPAS_LP_FORMAT_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "idpas/mip.h"

namespace idpas {

// CPLEX-style LP text: Minimize / Subject To / Bounds / Generals / Binaries.
// Every variable gets an explicit bound line, so the default [0, +inf) of the
// format never applies.
std::string WriteLpString(const MipInstance& inst);
void ExportLpFile(const MipInstance& inst, const std::filesystem::path& path);

// Reads the dialect produced by WriteLpString (single-line constraints,
// explicit bounds). Variables are numbered in order of first appearance in
// the Bounds section.
MipInstance ParseLpString(std::string_view text);

// Parses `name value` lines into a dense vector ordered like `inst`; unknown
// names raise ParseError, missing names default to 0.
std::vector<double> ParseSolutionText(const MipInstance& inst,
                                      std::string_view text);

// Runs an external solver through files. `command_template` may contain
// {lp} and {sol}, replaced by the LP file path and the solution file path.
struct ExternalSolverAdapter {
  std::string command_template;
  std::filesystem::path work_dir = std::filesystem::temp_directory_path();

  // Returns nullopt when the command fails or writes no solution file.
  std::optional<Solution> Solve(const MipInstance& inst) const;
};

}  // namespace idpas

#endif  // IDPAS_LP_FORMAT_H_
