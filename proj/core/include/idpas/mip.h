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

#ifndef IDPAS_MIP_H_
#define IDPAS_MIP_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idpas {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultIntegralityTol = 1e-6;

enum class VarKind { kContinuous, kBinary, kGeneralInteger };
enum class RowSense { kLe, kEq, kGe };

std::string_view ToString(VarKind kind);
std::string_view ToString(RowSense sense);

struct Term {
  int var = 0;
  double coeff = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
  std::vector<Term> terms;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;

  friend bool operator==(const Row&, const Row&) = default;
};

// A minimization MIP  min c'x  s.t.  rows, lower <= x <= upper, x_j integral
// for every j whose kind is not kContinuous. Variable order is the
// construction order and is never rearranged by any routine in this library.
struct MipInstance {
  std::string name;
  std::string family;
  std::int64_t param_seed = 0;

  std::vector<std::string> var_names;
  std::vector<VarKind> kinds;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  bool is_integer(int j) const { return kinds[j] != VarKind::kContinuous; }

  // Appends a variable and returns its index.
  int AddVariable(std::string var_name, VarKind kind, double lb, double ub,
                  double obj);
  void AddRow(std::vector<Term> terms, RowSense sense, double rhs);

  friend bool operator==(const MipInstance&, const MipInstance&) = default;
};

// Indices j with kind != kContinuous, ascending. This is the set I.
std::vector<int> IntegerIndices(const MipInstance& inst);

// Throws ValidationError listing every offending variable/row.
void Validate(const MipInstance& inst);

struct Solution {
  std::vector<double> values;
  double objective = 0.0;
  bool feasible = false;
  std::string source;
};

struct FeasibilityReport {
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  double max_integrality_violation = 0.0;
  bool feasible = false;
};

double EvaluateObjective(const MipInstance& inst, std::span<const double> x);

FeasibilityReport CheckFeasibility(const MipInstance& inst,
                                   std::span<const double> x, double tol);

// Label per integer variable (in IntegerIndices order): 0 when |x_i| <= tol,
// else 1.
std::vector<std::uint8_t> BinarizeSolution(const MipInstance& inst,
                                           std::span<const double> x,
                                           double tol = kDefaultIntegralityTol);

// Structured-text (JSON) instance format.
std::string SerializeInstance(const MipInstance& inst);
MipInstance ParseInstance(std::string_view text);
void SaveInstance(const MipInstance& inst, const std::filesystem::path& path);
MipInstance LoadInstance(const std::filesystem::path& path);

// FNV-1a over the canonical serialization; used to link datasets to
// instances.
std::uint64_t InstanceHash(const MipInstance& inst);

// Writes `contents` to `path` through a temporary file and a rename.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace idpas

#endif  // IDPAS_MIP_H_
