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

#include "idpas/mip.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include "idpas/errors.h"
#include "json.hpp"

namespace idpas {
namespace {

using nlohmann::json;

json BoundToJson(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

std::string FieldPath(std::string_view base, std::size_t index,
                      std::string_view field = {}) {
  std::ostringstream os;
  os << base << "[" << index << "]";
  if (!field.empty()) os << "." << field;
  return os.str();
}

double NumberField(const json& obj, const char* key, const std::string& where,
                   bool allow_inf = false) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError("missing field '" + where + "." + key + "'");
  }
  if (it->is_number()) return it->get<double>();
  if (allow_inf && it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError("field '" + where + "." + key + "' is not a number");
}

VarKind ParseKind(const std::string& s, const std::string& where) {
  if (s == "continuous") return VarKind::kContinuous;
  if (s == "binary") return VarKind::kBinary;
  if (s == "integer") return VarKind::kGeneralInteger;
  throw ParseError("field '" + where + ".kind' has unknown value '" + s + "'");
}

RowSense ParseSense(const std::string& s, const std::string& where) {
  if (s == "LE") return RowSense::kLe;
  if (s == "EQ") return RowSense::kEq;
  if (s == "GE") return RowSense::kGe;
  throw ParseError("field '" + where + ".sense' has unknown value '" + s +
                   "'");
}

std::size_t LineOfByte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + byte, '\n'));
}

bool IsIntegral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string_view ToString(VarKind kind) {
  switch (kind) {
    case VarKind::kContinuous:
      return "continuous";
    case VarKind::kBinary:
      return "binary";
    case VarKind::kGeneralInteger:
      return "integer";
  }
  return "?";
}

std::string_view ToString(RowSense sense) {
  switch (sense) {
    case RowSense::kLe:
      return "LE";
    case RowSense::kEq:
      return "EQ";
    case RowSense::kGe:
      return "GE";
  }
  return "?";
}

int MipInstance::AddVariable(std::string var_name, VarKind kind, double lb,
                             double ub, double obj) {
  var_names.push_back(std::move(var_name));
  kinds.push_back(kind);
  lower.push_back(lb);
  upper.push_back(ub);
  objective.push_back(obj);
  return num_vars() - 1;
}

void MipInstance::AddRow(std::vector<Term> terms, RowSense sense, double rhs) {
  rows.push_back(Row{std::move(terms), sense, rhs});
}

std::vector<int> IntegerIndices(const MipInstance& inst) {
  std::vector<int> out;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.is_integer(j)) out.push_back(j);
  }
  return out;
}

void Validate(const MipInstance& inst) {
  const std::size_t n = inst.objective.size();
  std::vector<std::string> problems;
  if (inst.kinds.size() != n || inst.lower.size() != n ||
      inst.upper.size() != n || inst.var_names.size() != n) {
    throw ValidationError("instance '" + inst.name +
                          "': per-variable arrays have inconsistent lengths");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double lb = inst.lower[j];
    const double ub = inst.upper[j];
    const std::string who = "variable " + std::to_string(j) + " ('" +
                            inst.var_names[j] + "')";
    if (!std::isfinite(inst.objective[j])) {
      problems.push_back(who + ": non-finite objective coefficient");
    }
    if (std::isnan(lb) || std::isnan(ub) || lb == kInf || ub == -kInf ||
        lb > ub) {
      problems.push_back(who + ": invalid bounds");
      continue;
    }
    switch (inst.kinds[j]) {
      case VarKind::kBinary:
        if (!IsIntegral(lb) || !IsIntegral(ub) || lb < 0.0 || ub > 1.0) {
          problems.push_back(who + ": binary variable must have bounds in "
                                   "[0,1]");
        }
        break;
      case VarKind::kGeneralInteger:
        if (!IsIntegral(lb) || !IsIntegral(ub)) {
          problems.push_back(who +
                             ": general integer needs finite integer bounds");
        }
        break;
      case VarKind::kContinuous:
        break;
    }
  }
  std::unordered_set<int> seen;
  for (std::size_t r = 0; r < inst.rows.size(); ++r) {
    const Row& row = inst.rows[r];
    const std::string who = "row " + std::to_string(r);
    if (!std::isfinite(row.rhs)) problems.push_back(who + ": non-finite rhs");
    seen.clear();
    for (const Term& t : row.terms) {
      if (t.var < 0 || static_cast<std::size_t>(t.var) >= n) {
        problems.push_back(who + ": column index " + std::to_string(t.var) +
                           " out of range");
      } else if (!seen.insert(t.var).second) {
        problems.push_back(who + ": duplicate column index " +
                           std::to_string(t.var));
      }
      if (!std::isfinite(t.coeff)) {
        problems.push_back(who + ": non-finite coefficient");
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "instance '" + inst.name + "' is invalid:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
}

double EvaluateObjective(const MipInstance& inst, std::span<const double> x) {
  if (x.size() != inst.objective.size()) {
    throw DimensionError("EvaluateObjective: expected " +
                         std::to_string(inst.objective.size()) +
                         " values, got " + std::to_string(x.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) sum += inst.objective[j] * x[j];
  return sum;
}

FeasibilityReport CheckFeasibility(const MipInstance& inst,
                                   std::span<const double> x, double tol) {
  if (x.size() != inst.objective.size()) {
    throw DimensionError("CheckFeasibility: expected " +
                         std::to_string(inst.objective.size()) +
                         " values, got " + std::to_string(x.size()));
  }
  FeasibilityReport rep;
  for (const Row& row : inst.rows) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coeff * x[t.var];
    double viol = 0.0;
    switch (row.sense) {
      case RowSense::kLe:
        viol = activity - row.rhs;
        break;
      case RowSense::kGe:
        viol = row.rhs - activity;
        break;
      case RowSense::kEq:
        viol = std::abs(activity - row.rhs);
        break;
    }
    rep.max_row_violation = std::max(rep.max_row_violation, viol);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = x[j];
    rep.max_bound_violation =
        std::max({rep.max_bound_violation, inst.lower[j] - v, v - inst.upper[j]});
    if (inst.kinds[j] != VarKind::kContinuous) {
      rep.max_integrality_violation = std::max(rep.max_integrality_violation,
                                               std::abs(v - std::round(v)));
    }
  }
  rep.feasible = rep.max_row_violation <= tol &&
                 rep.max_bound_violation <= tol &&
                 rep.max_integrality_violation <= tol;
  return rep;
}

std::vector<std::uint8_t> BinarizeSolution(const MipInstance& inst,
                                           std::span<const double> x,
                                           double tol) {
  if (x.size() != inst.objective.size()) {
    throw DimensionError("BinarizeSolution: expected " +
                         std::to_string(inst.objective.size()) +
                         " values, got " + std::to_string(x.size()));
  }
  std::vector<std::uint8_t> labels;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.is_integer(j)) labels.push_back(std::abs(x[j]) <= tol ? 0 : 1);
  }
  return labels;
}

std::string SerializeInstance(const MipInstance& inst) {
  json vars = json::array();
  for (int j = 0; j < inst.num_vars(); ++j) {
    vars.push_back(json{{"name", inst.var_names[j]},
                        {"kind", std::string(ToString(inst.kinds[j]))},
                        {"lb", BoundToJson(inst.lower[j])},
                        {"ub", BoundToJson(inst.upper[j])},
                        {"obj", inst.objective[j]}});
  }
  json rows = json::array();
  for (const Row& row : inst.rows) {
    json terms = json::array();
    for (const Term& t : row.terms) terms.push_back(json::array({t.var, t.coeff}));
    rows.push_back(json{{"terms", std::move(terms)},
                        {"sense", std::string(ToString(row.sense))},
                        {"rhs", row.rhs}});
  }
  // Keys are emitted in a fixed order so the text is canonical.
  json doc = json::object();
  doc["name"] = inst.name;
  doc["family"] = inst.family;
  doc["param_seed"] = inst.param_seed;
  doc["vars"] = std::move(vars);
  doc["rows"] = std::move(rows);
  std::ostringstream os;
  os << "{\n";
  os << "\"name\": " << doc["name"].dump() << ",\n";
  os << "\"family\": " << doc["family"].dump() << ",\n";
  os << "\"param_seed\": " << doc["param_seed"].dump() << ",\n";
  os << "\"vars\": [\n";
  for (std::size_t j = 0; j < doc["vars"].size(); ++j) {
    os << "  " << doc["vars"][j].dump()
       << (j + 1 < doc["vars"].size() ? ",\n" : "\n");
  }
  os << "],\n\"rows\": [\n";
  for (std::size_t r = 0; r < doc["rows"].size(); ++r) {
    os << "  " << doc["rows"][r].dump()
       << (r + 1 < doc["rows"].size() ? ",\n" : "\n");
  }
  os << "]\n}\n";
  return os.str();
}

MipInstance ParseInstance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("instance parse error at line " +
                     std::to_string(LineOfByte(text, e.byte)) + ": " +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be an object");

  MipInstance inst;
  auto get_string = [&](const char* key) -> std::string {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
      throw ParseError(std::string("missing or non-string field '") + key +
                       "'");
    }
    return it->get<std::string>();
  };
  inst.name = get_string("name");
  inst.family = get_string("family");
  if (auto it = doc.find("param_seed"); it != doc.end()) {
    if (!it->is_number_integer()) {
      throw ParseError("field 'param_seed' must be an integer");
    }
    inst.param_seed = it->get<std::int64_t>();
  }
  bool maximize = false;
  if (auto it = doc.find("objective_sense"); it != doc.end()) {
    if (*it == "max") {
      maximize = true;
    } else if (*it != "min") {
      throw ParseError("field 'objective_sense' must be \"min\" or \"max\"");
    }
  }

  auto vars = doc.find("vars");
  if (vars == doc.end() || !vars->is_array()) {
    throw ParseError("missing array field 'vars'");
  }
  for (std::size_t j = 0; j < vars->size(); ++j) {
    const json& v = (*vars)[j];
    const std::string where = FieldPath("vars", j);
    if (!v.is_object()) throw ParseError("field '" + where + "' is not an object");
    std::string var_name =
        v.contains("name") && v["name"].is_string() ? v["name"].get<std::string>()
                                                    : "x" + std::to_string(j);
    if (!v.contains("kind") || !v["kind"].is_string()) {
      throw ParseError("missing field '" + where + ".kind'");
    }
    VarKind kind = ParseKind(v["kind"].get<std::string>(), where);
    double lb = NumberField(v, "lb", where, true);
    double ub = NumberField(v, "ub", where, true);
    double obj = NumberField(v, "obj", where);
    inst.AddVariable(std::move(var_name), kind, lb, ub, maximize ? -obj : obj);
  }

  auto rows = doc.find("rows");
  if (rows == doc.end() || !rows->is_array()) {
    throw ParseError("missing array field 'rows'");
  }
  for (std::size_t r = 0; r < rows->size(); ++r) {
    const json& row = (*rows)[r];
    const std::string where = FieldPath("rows", r);
    if (!row.is_object() || !row.contains("terms") || !row["terms"].is_array()) {
      throw ParseError("missing array field '" + where + ".terms'");
    }
    std::vector<Term> terms;
    for (std::size_t k = 0; k < row["terms"].size(); ++k) {
      const json& t = row["terms"][k];
      if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() ||
          !t[1].is_number()) {
        throw ParseError("field '" + FieldPath(where + ".terms", k) +
                         "' must be [var_index, coeff]");
      }
      terms.push_back(Term{t[0].get<int>(), t[1].get<double>()});
    }
    if (!row.contains("sense") || !row["sense"].is_string()) {
      throw ParseError("missing field '" + where + ".sense'");
    }
    RowSense sense = ParseSense(row["sense"].get<std::string>(), where);
    inst.AddRow(std::move(terms), sense, NumberField(row, "rhs", where));
  }
  Validate(inst);
  return inst;
}

void SaveInstance(const MipInstance& inst, const std::filesystem::path& path) {
  Validate(inst);
  WriteFileAtomic(path, SerializeInstance(inst));
}

MipInstance LoadInstance(const std::filesystem::path& path) {
  return ParseInstance(ReadFile(path));
}

std::uint64_t InstanceHash(const MipInstance& inst) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : SerializeInstance(inst)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error("cannot rename '" + tmp.string() + "': " + ec.message());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace idpas
