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

#include "idpas/gat_model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "idpas/errors.h"
#include "idpas/instance_gen.h"
#include "idpas/rng.h"
#include "idpas/testing/oracles.h"
#include "idpas/testing/reference_gat.h"

namespace idpas {
namespace {

// Random pure-integer graph with n variables and m rows; some variables
// continuous when `mixed`.
MipInstance TinyInstance(std::uint64_t seed, int n, int m, bool mixed) {
  Rng rng(seed);
  MipInstance inst;
  for (int j = 0; j < n; ++j) {
    const VarKind kind = mixed && j % 3 == 2 ? VarKind::kContinuous : VarKind::kGeneralInteger;
    inst.AddVariable("x" + std::to_string(j), kind, 0, 1 + rng.UniformInt(4),
                     rng.Uniform(-3, 3));
  }
  for (int r = 0; r < m; ++r) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      if (rng.Uniform() < 0.6) terms.push_back({j, rng.Uniform(-2, 2)});
    }
    if (terms.empty()) terms.push_back({r % n, 1.0});
    inst.AddRow(std::move(terms), static_cast<RowSense>(rng.UniformInt(3)), rng.Uniform(-4, 4));
  }
  return inst;
}

TrainingSample RandomLabels(const BipartiteGraph& g, int count, std::uint64_t seed) {
  Rng rng(seed);
  TrainingSample s;
  s.num_integer = static_cast<int>(std::count(g.integer_mask.begin(), g.integer_mask.end(), 1));
  for (int u = 0; u < count; ++u) {
    std::vector<std::uint8_t> row(s.num_integer);
    for (auto& v : row) v = rng.Uniform() < 0.4;
    s.labels.push_back(row);
    s.objectives.push_back(u);
  }
  return s;
}

GatDims DimsFor(const BipartiteGraph& g, int L, int H) {
  GatDims d;
  d.hidden = L;
  d.heads = H;
  d.var_in = static_cast<int>(g.var_features.cols());
  d.identity_bits = g.identity_width;
  return d;
}

TEST(InitParamsTest, DeterministicInSeed) {
  GatDims d;
  d.var_in = 31;
  d.identity_bits = 16;
  EXPECT_EQ(InitParams(d, 5), InitParams(d, 5));
  EXPECT_NE(InitParams(d, 5).data(), InitParams(d, 6).data());
}

TEST(InitParamsTest, ClosedFormCount) {
  GatDims d;
  d.hidden = 16;
  d.heads = 4;
  d.var_in = 31;
  d.identity_bits = 16;
  // Embeddings (31+4+1)*16 + 3*16; per round 4 heads * (3*256 + 16) + 64*16;
  // output 256 + 16 + 16 + 1.
  const std::int64_t expected = 36 * 16 + 48 + 2 * (4 * (3 * 256 + 16) + 64 * 16) + 289;
  EXPECT_EQ(ParameterCount(d), expected);
  EXPECT_EQ(static_cast<std::int64_t>(InitParams(d, 1).size()), expected);
}

TEST(InitParamsTest, HeadsMustDivideWidth) {
  GatDims d;
  d.hidden = 10;
  d.heads = 4;
  EXPECT_THROW(InitParams(d, 1), DimensionError);
}

TEST(ForwardTest, IsolatedVariableUsesSkipPath) {
  MipInstance inst;
  inst.AddVariable("x", VarKind::kGeneralInteger, 0, 3, 1.0);
  BipartiteGraph g = EncodeBipartite(inst);
  Prediction p = Forward(InitParams(DimsFor(g, 8, 2), 3), g);
  ASSERT_EQ(p.scores.size(), 1u);
  EXPECT_TRUE(p.valid[0]);
  EXPECT_GT(p.scores[0], 0.0);
  EXPECT_LT(p.scores[0], 1.0);
}

TEST(ForwardTest, ContinuousVariablesMasked) {
  MipInstance inst = TinyInstance(4, 6, 3, true);
  BipartiteGraph g = EncodeBipartite(inst);
  Prediction p = Forward(InitParams(DimsFor(g, 8, 2), 3), g);
  for (int j = 0; j < inst.num_vars(); ++j) {
    EXPECT_EQ(p.valid[j] != 0, inst.is_integer(j));
    if (p.valid[j]) {
      EXPECT_GT(p.scores[j], 0.0);
      EXPECT_LT(p.scores[j], 1.0);
    }
  }
}

TEST(ForwardTest, SymmetricVariablesScoreEqual) {
  MipInstance inst;
  inst.AddVariable("a", VarKind::kGeneralInteger, 0, 2, 1.0);
  inst.AddVariable("b", VarKind::kGeneralInteger, 0, 2, 1.0);
  inst.AddVariable("c", VarKind::kGeneralInteger, 0, 5, -1.0);
  inst.AddRow({{0, 1.0}, {1, 1.0}, {2, 2.0}}, RowSense::kLe, 4.0);
  inst.AddRow({{0, 1.0}, {1, 1.0}}, RowSense::kGe, 1.0);
  BipartiteGraph g = EncodeBipartite(inst);
  Prediction p = Forward(InitParams(DimsFor(g, 16, 4), 9), g);
  EXPECT_NEAR(p.scores[0], p.scores[1], 1e-6);
}

TEST(ForwardTest, PermutationEquivariantWithoutIdentity) {
  MipInstance inst = GenerateInstance(FamilyConfig{}, 3);
  const int n = inst.num_vars();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(8);
  rng.Shuffle(std::span<int>(perm));
  MipInstance permuted = inst;
  for (int j = 0; j < n; ++j) {
    permuted.kinds[perm[j]] = inst.kinds[j];
    permuted.lower[perm[j]] = inst.lower[j];
    permuted.upper[perm[j]] = inst.upper[j];
    permuted.objective[perm[j]] = inst.objective[j];
    permuted.var_names[perm[j]] = inst.var_names[j];
  }
  for (Row& row : permuted.rows) {
    for (Term& t : row.terms) t.var = perm[t.var];
  }
  BipartiteGraph ga = EncodeBipartite(inst);
  BipartiteGraph gb = EncodeBipartite(permuted);
  GatParams params = InitParams(DimsFor(ga, 16, 4), 21);
  Prediction pa = Forward(params, ga);
  Prediction pb = Forward(params, gb);
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    EXPECT_EQ(pa.valid[j], pb.valid[perm[j]]);
    worst = std::max(worst, std::abs(pa.scores[j] - pb.scores[perm[j]]));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ForwardTest, WidthMismatch) {
  MipInstance inst = TinyInstance(1, 4, 2, false);
  BipartiteGraph g = EncodeBipartite(inst);
  GatParams params = InitParams(DimsFor(g, 8, 2), 1);
  EXPECT_THROW(Forward(params, AppendIdentity(g, 3)), DimensionError);
}

TEST(BceLossTest, HalfEverywhere) {
  Prediction p;
  p.scores = {0.5, 0.5, 0.0, 0.5};
  p.valid = {1, 1, 0, 1};
  TrainingSample s;
  s.num_integer = 3;
  s.labels = {{1, 0, 1}};
  EXPECT_NEAR(BceLoss(p, s), 3 * std::log(2.0), 1e-12);
}

TEST(BceLossTest, ClippedPerfectPrediction) {
  Prediction p;
  p.scores = {1.0, 0.0, 1.0};
  p.valid = {1, 1, 1};
  TrainingSample s;
  s.num_integer = 3;
  s.labels = {{1, 0, 1}};
  EXPECT_LE(BceLoss(p, s), 3 * -std::log(1 - 1e-7) + 1e-15);
}

TEST(BceLossTest, PoolSumsSingleLosses) {
  Prediction p;
  p.scores = {0.2, 0.7, 0.9};
  p.valid = {1, 1, 1};
  TrainingSample a, b, both;
  a.num_integer = b.num_integer = both.num_integer = 3;
  a.labels = {{1, 0, 1}};
  b.labels = {{0, 0, 1}};
  both.labels = {{1, 0, 1}, {0, 0, 1}};
  EXPECT_NEAR(BceLoss(p, both), BceLoss(p, a) + BceLoss(p, b), 1e-12);
  TrainingSample wrong;
  wrong.num_integer = 2;
  wrong.labels = {{1, 0}};
  EXPECT_THROW(BceLoss(p, wrong), DimensionError);
}

TEST(ForwardTest, AgreesWithReferenceImplementation) {
  for (std::uint64_t seed : {61, 62}) {
    MipInstance inst = TinyInstance(seed, 7, 4, true);
    BipartiteGraph g = AppendIdentity(EncodeBipartite(inst), 3);
    GatParams params = InitParams(DimsFor(g, 8, 4), seed);
    Prediction p = Forward(params, g);
    std::vector<long double> w(params.data().begin(), params.data().end());
    std::vector<long double> ref = testing::ReferenceScores(params.dims(), w, g);
    for (int j = 0; j < inst.num_vars(); ++j) {
      if (p.valid[j]) EXPECT_NEAR(p.scores[j], static_cast<double>(ref[j]), 1e-12);
    }
  }
}

TEST(GradientTest, OutputBiasWithZeroedHead) {
  MipInstance inst = TinyInstance(12, 5, 3, true);
  BipartiteGraph g = EncodeBipartite(inst);
  GatParams params = InitParams(DimsFor(g, 4, 2), 2);
  for (int k = 0; k < 4; ++k) params.data()[params.out_w2 + k] = 0.0;
  params.data()[params.out_b2] = 0.3;
  TrainingSample s = RandomLabels(g, 1, 0);
  for (auto& v : s.labels[0]) v = 0;
  Prediction p = Forward(params, g);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.scores.size(); ++j) sum += p.valid[j] ? p.scores[j] : 0.0;
  const double yhat = 1.0 / (1.0 + std::exp(-0.3));
  EXPECT_NEAR(sum, s.num_integer * yhat, 1e-12);
  GatParams grad = Gradient(params, g, s);
  EXPECT_NEAR(grad.data()[grad.out_b2], sum, 1e-12);
}

TEST(GradientTest, NoEdgesLeavesAttentionUntouched) {
  MipInstance inst;
  inst.AddVariable("x", VarKind::kGeneralInteger, 0, 3, 1.0);
  inst.AddVariable("y", VarKind::kGeneralInteger, 0, 2, -1.0);
  BipartiteGraph g = EncodeBipartite(inst);
  GatParams params = InitParams(DimsFor(g, 4, 2), 2);
  TrainingSample s = RandomLabels(g, 2, 1);
  GatParams grad = Gradient(params, g, s);
  const int L = 4;
  for (const auto& round : grad.rounds) {
    for (const auto& h : round.heads) {
      EXPECT_TRUE(grad.Mat(h.w_src, L, L).isZero(0.0));
      EXPECT_TRUE(grad.Mat(h.w_dst, L, L).isZero(0.0));
      EXPECT_TRUE(grad.Mat(h.w_edge, L, L).isZero(0.0));
      EXPECT_TRUE(grad.Mat(h.att, L, 1).isZero(0.0));
    }
    EXPECT_TRUE(grad.Mat(round.w_merge, 2 * L, L).isZero(0.0));
  }
  EXPECT_TRUE(grad.Mat(grad.edge_w, 1, L).isZero(0.0));
  EXPECT_FALSE(grad.Mat(grad.var_w, g.var_features.cols(), L).isZero(0.0));
}

TEST(GradientTest, MatchesCentralDifferences) {
  for (std::uint64_t seed : {31, 32, 33}) {
    MipInstance inst = TinyInstance(seed, 5, 3, seed == 33);
    BipartiteGraph g = EncodeBipartite(inst);
    GatParams params = InitParams(DimsFor(g, 4, 2), seed);
    TrainingSample s = RandomLabels(g, 3, seed);
    double loss = 0.0;
    GatParams grad = Gradient(params, g, s, &loss);
    EXPECT_NEAR(loss, BceLoss(Forward(params, g), s), 1e-10);
    int checked = 0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double analytic = grad.data()[k];
      if (std::abs(analytic) <= 1e-8) continue;
      const double fd = testing::ReferenceFiniteDifference(params, g, s, k, 1e-4);
      const double rel = std::abs(analytic - fd) / std::max(std::abs(analytic), std::abs(fd));
      EXPECT_LT(rel, 1e-4) << "coordinate " << k << " analytic " << analytic << " fd " << fd;
      ++checked;
    }
    EXPECT_GT(checked, static_cast<int>(params.size()) / 2);
  }
}

TEST(AdamStepTest, FirstStepMovesByLearningRate) {
  GatDims d;
  d.hidden = 4;
  d.heads = 2;
  GatParams p = InitParams(d, 1);
  const GatParams before = p;
  GatParams g(d);
  Rng rng(5);
  for (auto& v : g.data()) v = rng.Uniform(-3, 3);
  AdamState st;
  AdamStep(p, g, st, 1e-3);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double expected = g.data()[k] > 0 ? -1e-3 : 1e-3;
    EXPECT_NEAR(p.data()[k] - before.data()[k], expected,
                1e-3 * 1e-8 / std::abs(g.data()[k]) + 1e-15);
  }
}

TEST(AdamStepTest, ZeroGradientLeavesParameters) {
  GatDims d;
  d.hidden = 4;
  d.heads = 2;
  GatParams p = InitParams(d, 1);
  const GatParams before = p;
  AdamState st;
  AdamStep(p, GatParams(d), st, 1e-3);
  EXPECT_EQ(p, before);
}

TEST(AdamStepTest, TwoStepHandComputedMoments) {
  GatDims d;
  d.hidden = 4;
  d.heads = 2;
  GatParams p(d);
  GatParams g(d);
  std::fill(g.data().begin(), g.data().end(), 2.0);
  AdamState st;
  AdamStep(p, g, st, 0.1);
  AdamStep(p, g, st, 0.1);
  // m2 = 0.9*0.2 + 0.1*2 = 0.38; v2 = 0.999*0.004 + 0.001*4 = 0.007996.
  EXPECT_NEAR(st.m[0], 0.38, 1e-15);
  EXPECT_NEAR(st.v[0], 0.007996, 1e-15);
  EXPECT_EQ(st.step, 2);
  // Both steps have m_hat / sqrt(v_hat) = 1 (up to eps).
  EXPECT_NEAR(p.data()[0], -0.2, 1e-8);
  GatParams wrong(GatDims{8, 2});
  EXPECT_THROW(AdamStep(p, wrong, st, 0.1), DimensionError);
}

TEST(TrainTest, MemorizesSingleSample) {
  MipInstance inst = TinyInstance(40, 8, 4, false);
  BipartiteGraph g = EncodeBipartite(inst);
  TrainExample ex{g, RandomLabels(g, 2, 40)};
  TrainConfig cfg;
  cfg.max_steps = 500;
  cfg.seed = 3;
  TrainResult r = Train({ex}, {ex}, DimsFor(g, 8, 2), cfg);
  EXPECT_LT(MeanLoss(r.best, {ex}), r.initial_train_loss);
  EXPECT_LT(r.best_val_loss, r.initial_train_loss);
  EXPECT_EQ(r.curve.front().step, 0);
  EXPECT_EQ(r.curve.back().step, 500);
}

TEST(TrainTest, DeterministicCheckpoints) {
  std::vector<TrainExample> data;
  for (std::uint64_t seed = 50; seed < 53; ++seed) {
    BipartiteGraph g = EncodeBipartite(TinyInstance(7, 6, 3, false));
    data.push_back({g, RandomLabels(g, 2, seed)});
  }
  TrainConfig cfg;
  cfg.max_steps = 30;
  cfg.batch_size = 2;
  cfg.seed = 11;
  const GatDims d = DimsFor(data[0].graph, 8, 2);
  TrainResult a = Train(data, data, d, cfg);
  TrainResult b = Train(data, data, d, cfg);
  EXPECT_EQ(EncodeCheckpoint(a.best, a.state), EncodeCheckpoint(b.best, b.state));
  EXPECT_EQ(CurveCsv(a.curve), CurveCsv(b.curve));
}

TEST(TrainTest, RejectsEmptyData) {
  GatDims d;
  EXPECT_THROW(Train({}, {}, d, TrainConfig{}), ConfigError);
}

TEST(CheckpointTest, RoundTripAndErrors) {
  GatDims d;
  d.hidden = 8;
  d.heads = 2;
  d.var_in = 19;
  d.identity_bits = 4;
  GatParams p = InitParams(d, 4);
  AdamState st;
  AdamStep(p, InitParams(d, 5), st, 1e-3);
  const auto path = std::filesystem::temp_directory_path() / "idpas_ckpt_test.bin";
  SaveCheckpoint(path, p, st);
  AdamState back_state;
  GatParams back = LoadCheckpoint(path, &back_state, &d);
  EXPECT_EQ(back, p);
  EXPECT_EQ(back_state.m, st.m);
  EXPECT_EQ(back_state.v, st.v);
  EXPECT_EQ(back_state.step, 1);

  GatDims other = d;
  other.identity_bits = 5;
  other.var_in = 20;
  EXPECT_THROW(LoadCheckpoint(path, nullptr, &other), DimensionError);

  std::string bytes = EncodeCheckpoint(p, st);
  GatParams untouched = InitParams(d, 9);
  const GatParams snapshot = untouched;
  std::string corrupt = bytes;
  corrupt[1] = 'X';
  EXPECT_THROW(DecodeCheckpoint(corrupt, &untouched, nullptr), ParseError);
  corrupt = bytes;
  corrupt[8] = 7;  // L = 7 with H = 2
  EXPECT_THROW(DecodeCheckpoint(corrupt, &untouched, nullptr), ParseError);
  EXPECT_THROW(DecodeCheckpoint(bytes.substr(0, bytes.size() - 1), &untouched, nullptr),
               ParseError);
  EXPECT_EQ(untouched, snapshot);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace idpas
