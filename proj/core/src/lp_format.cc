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

#include "idpas/lp_format.h"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "idpas/errors.h"

namespace idpas {
namespace {

std::string FormatNumber(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool IsLpIdentifier(const std::string& s) {
  if (s.empty() || s.size() > 255) return false;
  if (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.' ||
      s[0] == 'e' || s[0] == 'E') {
    return false;
  }
  for (char ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' &&
        ch != '.' && ch != '[' && ch != ']') {
      return false;
    }
  }
  return true;
}

std::vector<std::string> LpNames(const MipInstance& inst) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  bool usable = true;
  for (const auto& s : inst.var_names) {
    if (!IsLpIdentifier(s) || !seen.insert(s).second) {
      usable = false;
      break;
    }
  }
  for (int j = 0; j < inst.num_vars(); ++j) {
    names.push_back(usable ? inst.var_names[j] : "x" + std::to_string(j));
  }
  return names;
}

void AppendLinear(std::ostringstream& os, const std::vector<Term>& terms,
                  const std::vector<std::string>& names) {
  bool first = true;
  for (const Term& t : terms) {
    if (first) {
      os << FormatNumber(t.coeff) << " " << names[t.var];
    } else if (t.coeff < 0 || std::signbit(t.coeff)) {
      os << " - " << FormatNumber(-t.coeff) << " " << names[t.var];
    } else {
      os << " + " << FormatNumber(t.coeff) << " " << names[t.var];
    }
    first = false;
  }
}

double ParseNumber(const std::string& tok, int line) {
  if (tok == "+inf" || tok == "inf" || tok == "+infinity" ||
      tok == "infinity") {
    return kInf;
  }
  if (tok == "-inf" || tok == "-infinity") return -kInf;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError("LP line " + std::to_string(line) + ": expected number, got '" +
                     tok + "'");
  }
  return v;
}

bool LooksNumeric(const std::string& tok) {
  if (tok.empty()) return false;
  char* end = nullptr;
  std::strtod(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0';
}

std::vector<std::string> Tokenize(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string Lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

std::string WriteLpString(const MipInstance& inst) {
  Validate(inst);
  const auto names = LpNames(inst);
  std::ostringstream os;
  os << "\\ instance " << inst.name << " family " << inst.family
     << " param_seed " << inst.param_seed << "\n";
  os << "Minimize\n obj: ";
  std::vector<Term> obj_terms;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.objective[j] != 0.0) obj_terms.push_back({j, inst.objective[j]});
  }
  if (obj_terms.empty() && inst.num_vars() > 0) obj_terms.push_back({0, 0.0});
  AppendLinear(os, obj_terms, names);
  os << "\nSubject To\n";
  for (int r = 0; r < inst.num_rows(); ++r) {
    const Row& row = inst.rows[r];
    os << " c" << r << ": ";
    if (row.terms.empty()) {
      os << "0 " << names.front();
    } else {
      AppendLinear(os, row.terms, names);
    }
    const char* op = row.sense == RowSense::kLe   ? " <= "
                     : row.sense == RowSense::kGe ? " >= "
                                                  : " = ";
    os << op << FormatNumber(row.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.lower[j] == -kInf && inst.upper[j] == kInf) {
      os << " " << names[j] << " free\n";
    } else {
      os << " " << FormatNumber(inst.lower[j]) << " <= " << names[j]
         << " <= " << FormatNumber(inst.upper[j]) << "\n";
    }
  }
  std::ostringstream generals, binaries;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.kinds[j] == VarKind::kGeneralInteger) generals << " " << names[j] << "\n";
    if (inst.kinds[j] == VarKind::kBinary) binaries << " " << names[j] << "\n";
  }
  if (!generals.str().empty()) os << "Generals\n" << generals.str();
  if (!binaries.str().empty()) os << "Binaries\n" << binaries.str();
  os << "End\n";
  return os.str();
}

void ExportLpFile(const MipInstance& inst, const std::filesystem::path& path) {
  WriteFileAtomic(path, WriteLpString(inst));
}

MipInstance ParseLpString(std::string_view text) {
  enum class Section {
    kNone,
    kObjective,
    kConstraints,
    kBounds,
    kGenerals,
    kBinaries,
    kEnd
  };
  using NamedTerms = std::vector<std::pair<std::string, double>>;
  struct PendingRow {
    NamedTerms terms;
    RowSense sense;
    double rhs;
    int line;
  };

  auto parse_linear = [](const std::vector<std::string>& toks,
                         std::size_t begin, std::size_t end, int line) {
    NamedTerms terms;
    double sign = 1.0;
    double coeff = 1.0;
    bool have_coeff = false;
    for (std::size_t k = begin; k < end; ++k) {
      const std::string& t = toks[k];
      if (t == "+") {
        sign = 1.0;
      } else if (t == "-") {
        sign = -1.0;
      } else if (LooksNumeric(t)) {
        coeff = ParseNumber(t, line);
        have_coeff = true;
      } else {
        terms.emplace_back(t, sign * (have_coeff ? coeff : 1.0));
        sign = 1.0;
        coeff = 1.0;
        have_coeff = false;
      }
    }
    return terms;
  };

  Section section = Section::kNone;
  MipInstance inst;
  inst.name = "lp";
  std::unordered_map<std::string, int> index;
  NamedTerms objective;
  int objective_line = 0;
  std::vector<PendingRow> rows;

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('\\'); pos != std::string::npos) {
      if (section == Section::kNone && pos == 0) {
        auto toks = Tokenize(line.substr(1));
        for (std::size_t k = 0; k + 1 < toks.size(); k += 2) {
          if (toks[k] == "instance") inst.name = toks[k + 1];
          if (toks[k] == "family") inst.family = toks[k + 1];
          if (toks[k] == "param_seed") {
            inst.param_seed = std::atoll(toks[k + 1].c_str());
          }
        }
      }
      line = line.substr(0, pos);
    }
    auto toks = Tokenize(line);
    if (toks.empty()) continue;
    const std::string head = Lower(toks[0]);
    if (head == "minimize" || head == "min") {
      section = Section::kObjective;
      continue;
    }
    if (head == "maximize" || head == "max") {
      throw ParseError("LP line " + std::to_string(line_no) +
                       ": only Minimize objectives are supported");
    }
    if (head == "subject" || head == "st" || head == "s.t.") {
      section = Section::kConstraints;
      continue;
    }
    if (head == "bounds") {
      section = Section::kBounds;
      continue;
    }
    if (head == "generals" || head == "general") {
      section = Section::kGenerals;
      continue;
    }
    if (head == "binaries" || head == "binary") {
      section = Section::kBinaries;
      continue;
    }
    if (head == "end") {
      section = Section::kEnd;
      continue;
    }
    std::size_t begin = 0;
    if (toks[0].back() == ':') begin = 1;
    switch (section) {
      case Section::kObjective: {
        auto terms = parse_linear(toks, begin, toks.size(), line_no);
        objective.insert(objective.end(), terms.begin(), terms.end());
        objective_line = line_no;
        break;
      }
      case Section::kConstraints: {
        std::size_t op = toks.size();
        for (std::size_t k = begin; k < toks.size(); ++k) {
          if (toks[k] == "<=" || toks[k] == ">=" || toks[k] == "=" ||
              toks[k] == "=<" || toks[k] == "=>") {
            op = k;
            break;
          }
        }
        if (op + 2 != toks.size()) {
          throw ParseError("LP line " + std::to_string(line_no) +
                           ": constraint must end with '<op> rhs'");
        }
        RowSense sense = (toks[op] == "<=" || toks[op] == "=<")   ? RowSense::kLe
                         : (toks[op] == ">=" || toks[op] == "=>") ? RowSense::kGe
                                                                  : RowSense::kEq;
        rows.push_back({parse_linear(toks, begin, op, line_no), sense,
                        ParseNumber(toks[op + 1], line_no), line_no});
        break;
      }
      case Section::kBounds: {
        double lb = 0.0, ub = kInf;
        std::string name;
        if (toks.size() == 2 && Lower(toks[1]) == "free") {
          name = toks[0];
          lb = -kInf;
        } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
          lb = ParseNumber(toks[0], line_no);
          name = toks[2];
          ub = ParseNumber(toks[4], line_no);
        } else if (toks.size() == 3 && (toks[1] == ">=" || toks[1] == "<=")) {
          name = toks[0];
          (toks[1] == ">=" ? lb : ub) = ParseNumber(toks[2], line_no);
        } else {
          throw ParseError("LP line " + std::to_string(line_no) +
                           ": unsupported bound syntax");
        }
        if (!index.try_emplace(name, inst.num_vars()).second) {
          throw ParseError("LP line " + std::to_string(line_no) +
                           ": duplicate bound for '" + name + "'");
        }
        inst.AddVariable(name, VarKind::kContinuous, lb, ub, 0.0);
        break;
      }
      case Section::kGenerals:
      case Section::kBinaries:
        for (const auto& name : toks) {
          auto it = index.find(name);
          if (it == index.end()) {
            throw ParseError("LP line " + std::to_string(line_no) +
                             ": integer marker for unknown variable '" + name +
                             "'");
          }
          inst.kinds[it->second] = section == Section::kGenerals
                                       ? VarKind::kGeneralInteger
                                       : VarKind::kBinary;
        }
        break;
      case Section::kNone:
      case Section::kEnd:
        throw ParseError("LP line " + std::to_string(line_no) +
                         ": content outside of a section");
    }
  }

  auto resolve = [&index](const std::string& name, int line) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw ParseError("LP line " + std::to_string(line) +
                       ": variable '" + name + "' has no bound line");
    }
    return it->second;
  };
  for (const auto& [name, c] : objective) {
    inst.objective[resolve(name, objective_line)] += c;
  }
  for (const PendingRow& row : rows) {
    std::vector<Term> terms;
    for (const auto& [name, c] : row.terms) {
      // "0 x" placeholders keep empty rows syntactically valid.
      if (c != 0.0) terms.push_back({resolve(name, row.line), c});
    }
    inst.AddRow(std::move(terms), row.sense, row.rhs);
  }
  Validate(inst);
  return inst;
}

std::vector<double> ParseSolutionText(const MipInstance& inst,
                                      std::string_view text) {
  std::unordered_map<std::string, int> index;
  const auto names = LpNames(inst);
  for (int j = 0; j < inst.num_vars(); ++j) index.emplace(names[j], j);
  std::vector<double> x(inst.num_vars(), 0.0);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = Tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 2) {
      throw ParseError("solution line " + std::to_string(line_no) +
                       ": expected 'name value'");
    }
    auto it = index.find(toks[0]);
    if (it == index.end()) {
      throw ParseError("solution line " + std::to_string(line_no) +
                       ": unknown variable '" + toks[0] + "'");
    }
    x[it->second] = ParseNumber(toks[1], line_no);
  }
  return x;
}

std::optional<Solution> ExternalSolverAdapter::Solve(
    const MipInstance& inst) const {
  const auto lp = work_dir / (inst.name + ".lp");
  const auto sol = work_dir / (inst.name + ".sol");
  ExportLpFile(inst, lp);
  std::filesystem::remove(sol);
  std::string cmd = command_template;
  auto replace = [&cmd](const std::string& key, const std::string& value) {
    for (std::size_t pos = cmd.find(key); pos != std::string::npos;
         pos = cmd.find(key, pos + value.size())) {
      cmd.replace(pos, key.size(), value);
    }
  };
  replace("{lp}", lp.string());
  replace("{sol}", sol.string());
  if (std::system(cmd.c_str()) != 0 || !std::filesystem::exists(sol)) {
    return std::nullopt;
  }
  Solution s;
  s.values = ParseSolutionText(inst, ReadFile(sol));
  s.objective = EvaluateObjective(inst, s.values);
  s.feasible = CheckFeasibility(inst, s.values, 1e-6).feasible;
  s.source = "external";
  return s;
}

}  // namespace idpas
