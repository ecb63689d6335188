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

#include <gtest/gtest.h>

#include <filesystem>

#include "idpas/errors.h"
#include "idpas/rng.h"

namespace idpas {
namespace {

MipInstance TwoVar() {
  MipInstance inst;
  inst.name = "two";
  inst.family = "toy";
  inst.param_seed = 7;
  inst.AddVariable("x1", VarKind::kGeneralInteger, 0, 2, 1.0);
  inst.AddVariable("x2", VarKind::kContinuous, -kInf, kInf, 2.0);
  inst.AddRow({{0, 1.0}, {1, 1.0}}, RowSense::kLe, 3.0);
  return inst;
}

TEST(MipInstanceTest, SaveLoadRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "idpas_two.json";
  MipInstance inst = TwoVar();
  SaveInstance(inst, path);
  EXPECT_EQ(LoadInstance(path), inst);
  EXPECT_EQ(SerializeInstance(LoadInstance(path)), SerializeInstance(inst));
}

TEST(MipInstanceTest, BinaryOutsideUnitBoxIsRejected) {
  MipInstance inst = TwoVar();
  inst.AddVariable("b", VarKind::kBinary, 0, 2, 0.0);
  EXPECT_THROW(Validate(inst), ValidationError);
  try {
    ParseInstance(SerializeInstance(inst));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("variable 2"), std::string::npos);
  }
}

TEST(MipInstanceTest, ParseErrorsNameLineAndField) {
  try {
    ParseInstance("{\n\"name\": \"a\",\n\"family\": ,\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  try {
    ParseInstance(R"({"name":"a","family":"f","vars":[{"kind":"integer","lb":0,"obj":1}],"rows":[]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("vars[0].ub"), std::string::npos);
  }
}

TEST(MipInstanceTest, InvariantViolations) {
  MipInstance inst = TwoVar();
  inst.rows[0].terms.push_back({0, 2.0});
  EXPECT_THROW(Validate(inst), ValidationError);  // duplicate column
  inst = TwoVar();
  inst.rows[0].terms.push_back({5, 2.0});
  EXPECT_THROW(Validate(inst), ValidationError);  // out of range
  inst = TwoVar();
  inst.upper[0] = kInf;
  EXPECT_THROW(Validate(inst), ValidationError);  // unbounded general integer
}

TEST(MipInstanceTest, MaximizationIsNegatedAtLoad) {
  MipInstance inst = ParseInstance(
      R"({"name":"m","family":"f","objective_sense":"max",
          "vars":[{"kind":"continuous","lb":0,"ub":1,"obj":3}],"rows":[]})");
  EXPECT_EQ(inst.objective[0], -3.0);
}

TEST(EvaluateObjectiveTest, DotProduct) {
  MipInstance inst = TwoVar();
  EXPECT_EQ(EvaluateObjective(inst, std::vector<double>{0, 0}), 0.0);
  EXPECT_EQ(EvaluateObjective(inst, std::vector<double>{3, 4}), 11.0);
  EXPECT_THROW(EvaluateObjective(inst, std::vector<double>{1}), DimensionError);
}

TEST(EvaluateObjectiveTest, IsLinear) {
  Rng rng(11);
  MipInstance inst;
  for (int j = 0; j < 20; ++j) {
    inst.AddVariable("v", VarKind::kContinuous, -kInf, kInf, rng.Uniform(-5, 5));
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(20), y(20), z(20);
    const double a = rng.Uniform(-3, 3), b = rng.Uniform(-3, 3);
    for (int j = 0; j < 20; ++j) {
      x[j] = rng.Uniform(-10, 10);
      y[j] = rng.Uniform(-10, 10);
      z[j] = a * x[j] + b * y[j];
    }
    const double lhs = EvaluateObjective(inst, z);
    const double rhs = a * EvaluateObjective(inst, x) + b * EvaluateObjective(inst, y);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)) * 100);
  }
}

TEST(CheckFeasibilityTest, Examples) {
  MipInstance inst;
  inst.AddVariable("x1", VarKind::kGeneralInteger, 0, 3, 0.0);
  inst.AddVariable("x2", VarKind::kGeneralInteger, 0, 3, 0.0);
  inst.AddRow({{0, 1.0}, {1, 1.0}}, RowSense::kLe, 3.0);

  FeasibilityReport ok = CheckFeasibility(inst, std::vector<double>{1, 1}, 1e-6);
  EXPECT_TRUE(ok.feasible);
  EXPECT_EQ(ok.max_row_violation, 0.0);
  EXPECT_EQ(ok.max_bound_violation, 0.0);
  EXPECT_EQ(ok.max_integrality_violation, 0.0);

  FeasibilityReport bad = CheckFeasibility(inst, std::vector<double>{2, 2}, 1e-6);
  EXPECT_FALSE(bad.feasible);
  EXPECT_EQ(bad.max_row_violation, 1.0);

  FeasibilityReport frac = CheckFeasibility(inst, std::vector<double>{2.4, 0}, 1e-6);
  EXPECT_NEAR(frac.max_integrality_violation, 0.4, 1e-12);
  EXPECT_FALSE(frac.feasible);
}

TEST(CheckFeasibilityTest, MonotoneInTolerance) {
  Rng rng(5);
  MipInstance inst;
  inst.AddVariable("x", VarKind::kGeneralInteger, 0, 5, 0.0);
  inst.AddVariable("y", VarKind::kContinuous, 0, 5, 0.0);
  inst.AddRow({{0, 1.0}, {1, 2.0}}, RowSense::kEq, 4.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x = {rng.Uniform(-0.1, 5.1), rng.Uniform(-0.1, 5.1)};
    const double tol = rng.Uniform(1e-6, 1.0);
    if (CheckFeasibility(inst, x, tol).feasible) {
      EXPECT_TRUE(CheckFeasibility(inst, x, tol * 1.5).feasible);
    }
  }
}

TEST(BinarizeSolutionTest, ThresholdRule) {
  MipInstance inst;
  inst.AddVariable("a", VarKind::kGeneralInteger, 0, 5, 0.0);
  inst.AddVariable("c", VarKind::kContinuous, 0, 5, 0.0);
  inst.AddVariable("b", VarKind::kGeneralInteger, 0, 5, 0.0);
  inst.AddVariable("d", VarKind::kBinary, 0, 1, 0.0);
  auto labels = BinarizeSolution(inst, std::vector<double>{0, 2.5, 3, 1e-7}, 1e-6);
  EXPECT_EQ(labels, (std::vector<std::uint8_t>{0, 1, 0}));
  auto zeros = BinarizeSolution(inst, std::vector<double>{0, 1, 0, 0}, 1e-6);
  EXPECT_EQ(zeros, (std::vector<std::uint8_t>{0, 0, 0}));
}

TEST(BinarizeSolutionTest, IdempotentOnLabels) {
  MipInstance inst;
  Rng rng(3);
  for (int j = 0; j < 30; ++j) inst.AddVariable("v", VarKind::kBinary, 0, 1, 0.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(30);
    std::vector<std::uint8_t> expected(30);
    for (int j = 0; j < 30; ++j) {
      expected[j] = static_cast<std::uint8_t>(rng.UniformInt(2));
      x[j] = expected[j];
    }
    EXPECT_EQ(BinarizeSolution(inst, x), expected);
  }
}

}  // namespace
}  // namespace idpas
