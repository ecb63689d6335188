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

#ifndef IDPAS_GAT_MODEL_H_
#define IDPAS_GAT_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "idpas/dataset.h"
#include "idpas/graph_encode.h"

namespace idpas {

inline constexpr double kLeakySlope = 0.2;
inline constexpr double kBceClip = 1e-7;

struct GatDims {
  int hidden = 16;  // L
  int heads = 4;    // H
  int var_in = kVarFeatures;
  int cons_in = kConsFeatures;
  int edge_in = kEdgeFeatures;
  int identity_bits = 0;  // B; var_in includes these columns

  // Throws DimensionError when sizes are non-positive or L % H != 0.
  void Validate() const;
  friend bool operator==(const GatDims&, const GatDims&) = default;
};

// Closed-form parameter count:
//   (var_in + cons_in + edge_in + 3) L            input embeddings
//   + 2 (H (3 L^2 + L) + H L^2)                   two attention rounds
//   + L^2 + 2 L + 1                               output head
std::int64_t ParameterCount(const GatDims& dims);

// All weights in one flat array. Tensor order (matrices column-major):
//   var_W (var_in x L), var_b (L), cons_W (cons_in x L), cons_b (L),
//   edge_W (edge_in x L), edge_b (L),
//   for round in {1, 2}: for head in 0..H-1: W_src, W_dst, W_edge (L x L),
//     att (L); then W_merge (H L x L),
//   out_W1 (L x L), out_b1 (L), out_w2 (L), out_b2 (1).
// Round 1: constraints attend to variables. Round 2: variables attend to
// constraints.
class GatParams {
 public:
  struct HeadOffsets {
    std::size_t w_src, w_dst, w_edge, att;
  };
  struct RoundOffsets {
    std::vector<HeadOffsets> heads;
    std::size_t w_merge;
  };

  GatParams() = default;
  // Zero-initialized parameters.
  explicit GatParams(const GatDims& dims);

  const GatDims& dims() const { return dims_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  Eigen::Map<Eigen::MatrixXd> Mat(std::size_t offset, int rows, int cols) {
    return {data_.data() + offset, rows, cols};
  }
  Eigen::Map<const Eigen::MatrixXd> Mat(std::size_t offset, int rows, int cols) const {
    return {data_.data() + offset, rows, cols};
  }

  std::size_t var_w = 0, var_b = 0, cons_w = 0, cons_b = 0, edge_w = 0, edge_b = 0;
  RoundOffsets rounds[2];
  std::size_t out_w1 = 0, out_b1 = 0, out_w2 = 0, out_b2 = 0;

  friend bool operator==(const GatParams& a, const GatParams& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  GatDims dims_;
  std::vector<double> data_;
};

// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) drawn in layout order
// from the portable generator; biases zero.
GatParams InitParams(const GatDims& dims, std::uint64_t seed);

struct Prediction {
  std::vector<double> scores;  // per variable; 0 where !valid
  std::vector<char> valid;     // integer variables only
};

Prediction Forward(const GatParams& params, const BipartiteGraph& graph);

// Multiply-add count of one Forward call; used to charge inference to a
// deterministic solver clock.
double ForwardWork(const GatDims& dims, const BipartiteGraph& graph);

// Sum over label vectors u and integer variables i of the clipped binary
// cross-entropy. Labels follow the order of valid entries.
double BceLoss(const Prediction& pred, const TrainingSample& sample);

// Analytic gradient of BceLoss(Forward(params, graph), sample). Optionally
// returns the loss.
GatParams Gradient(const GatParams& params, const BipartiteGraph& graph,
                   const TrainingSample& sample, double* loss = nullptr);

struct AdamState {
  std::int64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// Bias-corrected Adam. Empty state moments are zero-initialized.
void AdamStep(GatParams& params, const GatParams& grad, AdamState& state, double lr);

struct TrainConfig {
  int batch_size = 16;
  std::int64_t max_steps = 2000;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct TrainExample {
  BipartiteGraph graph;
  TrainingSample sample;
};

struct CurvePoint {
  std::int64_t step = 0;
  int epoch = 0;
  double train_loss = 0.0;  // per instance, averaged over the epoch
  double val_loss = 0.0;    // per instance
};

struct TrainResult {
  GatParams best;
  AdamState state;  // state at the best checkpoint
  double best_val_loss = 0.0;
  std::int64_t best_step = 0;
  double initial_train_loss = 0.0;  // per instance, before any update
  std::vector<CurvePoint> curve;
};

// Per-instance mean loss over `examples`.
double MeanLoss(const GatParams& params, const std::vector<TrainExample>& examples);

// Epochs of seeded shuffles, mini-batches of summed gradients, validation
// after every epoch (and at the final step), best validation parameters
// kept. Throws NumericalError if a loss or gradient becomes non-finite.
TrainResult Train(const std::vector<TrainExample>& train,
                  const std::vector<TrainExample>& validation,
                  const GatDims& dims, const TrainConfig& cfg);

std::string CurveCsv(const std::vector<CurvePoint>& curve);

// Binary checkpoint: "IDPG" | u32 version | u32 L, H, var_in, cons_in,
// edge_in, B | i64 step | u64 parameter count | f64 params | f64 m | f64 v.
// Little-endian throughout.
std::string EncodeCheckpoint(const GatParams& params, const AdamState& state);
void DecodeCheckpoint(std::string_view bytes, GatParams* params, AdamState* state);
void SaveCheckpoint(const std::filesystem::path& path, const GatParams& params,
                    const AdamState& state);
// Throws ParseError on a bad header and DimensionError if `expected` is
// given and differs.
GatParams LoadCheckpoint(const std::filesystem::path& path,
                         AdamState* state = nullptr,
                         const GatDims* expected = nullptr);

}  // namespace idpas

#endif  // IDPAS_GAT_MODEL_H_
