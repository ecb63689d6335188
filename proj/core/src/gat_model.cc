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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>

#include "idpas/errors.h"
#include "idpas/rng.h"

namespace idpas {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr char kCheckpointMagic[4] = {'I', 'D', 'P', 'G'};
constexpr std::uint32_t kCheckpointVersion = 1;

double Leaky(double x) { return x > 0.0 ? x : kLeakySlope * x; }
double LeakyGrad(double x) { return x > 0.0 ? 1.0 : kLeakySlope; }

MatrixXd LeakyM(const MatrixXd& x) { return x.unaryExpr(&Leaky); }
MatrixXd LeakyGradM(const MatrixXd& x) { return x.unaryExpr(&LeakyGrad); }

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct HeadCache {
  MatrixXd ps, pt, pe, u;
  VectorXd alpha;
};

struct RoundCache {
  std::vector<HeadCache> heads;
  MatrixXd concat, q;
};

// Edge lists seen from one round: src indexes rows of S, dst rows of T.
struct EdgeView {
  std::vector<int> src, dst;
};

// One attention round: targets T attend to sources S over edges; returns
// T + LeakyReLU(concat_heads(messages) W_merge).
MatrixXd AttnForward(const GatParams& p, int round, const MatrixXd& s,
                     const MatrixXd& t, const MatrixXd& e, const EdgeView& ev,
                     RoundCache* cache) {
  const int L = p.dims().hidden;
  const int H = p.dims().heads;
  const int nt = static_cast<int>(t.rows());
  const int ne = static_cast<int>(ev.src.size());
  const GatParams::RoundOffsets& ro = p.rounds[round];
  cache->heads.resize(H);
  cache->concat = MatrixXd::Zero(nt, H * L);
  for (int k = 0; k < H; ++k) {
    HeadCache& hc = cache->heads[k];
    const auto& off = ro.heads[k];
    hc.ps = s * p.Mat(off.w_src, L, L);
    hc.pt = t * p.Mat(off.w_dst, L, L);
    hc.pe = e * p.Mat(off.w_edge, L, L);
    const auto att = p.Mat(off.att, L, 1);
    hc.u.resize(ne, L);
    VectorXd score(ne);
    for (int x = 0; x < ne; ++x) {
      hc.u.row(x) = hc.ps.row(ev.src[x]) + hc.pt.row(ev.dst[x]) + hc.pe.row(x);
      score(x) = hc.u.row(x).unaryExpr(&Leaky).dot(att.col(0).transpose());
    }
    VectorXd max_score = VectorXd::Constant(nt, -std::numeric_limits<double>::infinity());
    for (int x = 0; x < ne; ++x) max_score(ev.dst[x]) = std::max(max_score(ev.dst[x]), score(x));
    VectorXd denom = VectorXd::Zero(nt);
    hc.alpha.resize(ne);
    for (int x = 0; x < ne; ++x) {
      hc.alpha(x) = std::exp(score(x) - max_score(ev.dst[x]));
      denom(ev.dst[x]) += hc.alpha(x);
    }
    for (int x = 0; x < ne; ++x) {
      hc.alpha(x) /= denom(ev.dst[x]);
      cache->concat.row(ev.dst[x]).segment(k * L, L) += hc.alpha(x) * hc.ps.row(ev.src[x]);
    }
  }
  cache->q = cache->concat * p.Mat(ro.w_merge, H * L, L);
  return t + LeakyM(cache->q);
}

// Accumulates gradients of one round into grad and returns nothing; d_s,
// d_t, d_e receive input gradients (added).
void AttnBackward(const GatParams& p, GatParams& grad, int round, const MatrixXd& s,
                  const MatrixXd& t, const MatrixXd& e, const EdgeView& ev,
                  const RoundCache& cache, const MatrixXd& d_out, MatrixXd& d_s,
                  MatrixXd& d_t, MatrixXd& d_e) {
  const int L = p.dims().hidden;
  const int H = p.dims().heads;
  const int ne = static_cast<int>(ev.src.size());
  const GatParams::RoundOffsets& ro = p.rounds[round];
  d_t += d_out;
  const MatrixXd d_q = d_out.cwiseProduct(LeakyGradM(cache.q));
  grad.Mat(ro.w_merge, H * L, L) += cache.concat.transpose() * d_q;
  const MatrixXd d_concat = d_q * p.Mat(ro.w_merge, H * L, L).transpose();
  for (int k = 0; k < H; ++k) {
    const HeadCache& hc = cache.heads[k];
    const auto& off = ro.heads[k];
    const auto att = p.Mat(off.att, L, 1);
    MatrixXd d_ps = MatrixXd::Zero(hc.ps.rows(), L);
    MatrixXd d_pt = MatrixXd::Zero(hc.pt.rows(), L);
    MatrixXd d_pe = MatrixXd::Zero(ne, L);
    VectorXd d_alpha(ne);
    for (int x = 0; x < ne; ++x) {
      const auto d_msg = d_concat.row(ev.dst[x]).segment(k * L, L);
      d_alpha(x) = d_msg.dot(hc.ps.row(ev.src[x]));
      d_ps.row(ev.src[x]) += hc.alpha(x) * d_msg;
    }
    VectorXd weighted = VectorXd::Zero(t.rows());
    for (int x = 0; x < ne; ++x) weighted(ev.dst[x]) += hc.alpha(x) * d_alpha(x);
    auto d_att = grad.Mat(off.att, L, 1);
    for (int x = 0; x < ne; ++x) {
      const double d_score = hc.alpha(x) * (d_alpha(x) - weighted(ev.dst[x]));
      if (d_score == 0.0) continue;
      const Eigen::RowVectorXd act = hc.u.row(x).unaryExpr(&Leaky);
      d_att.col(0) += d_score * act.transpose();
      const Eigen::RowVectorXd d_u =
          d_score * att.col(0).transpose().cwiseProduct(hc.u.row(x).unaryExpr(&LeakyGrad));
      d_ps.row(ev.src[x]) += d_u;
      d_pt.row(ev.dst[x]) += d_u;
      d_pe.row(x) += d_u;
    }
    grad.Mat(off.w_src, L, L) += s.transpose() * d_ps;
    grad.Mat(off.w_dst, L, L) += t.transpose() * d_pt;
    grad.Mat(off.w_edge, L, L) += e.transpose() * d_pe;
    d_s += d_ps * p.Mat(off.w_src, L, L).transpose();
    d_t += d_pt * p.Mat(off.w_dst, L, L).transpose();
    d_e += d_pe * p.Mat(off.w_edge, L, L).transpose();
  }
}

struct ForwardCache {
  MatrixXd xv, xc, xe;   // inputs
  MatrixXd hv0, hc0, he;  // embeddings
  MatrixXd hc1, hv1;      // after rounds 1 and 2
  RoundCache r1, r2;
  EdgeView var_to_cons, cons_to_var;
  MatrixXd z1;            // output hidden pre-activation
  VectorXd logits;
  std::vector<int> int_index;
};

void CheckWidths(const GatParams& p, const BipartiteGraph& g) {
  const GatDims& d = p.dims();
  if (g.var_features.cols() != d.var_in || g.cons_features.cols() != d.cons_in ||
      d.edge_in != kEdgeFeatures) {
    throw DimensionError("graph feature widths (" + std::to_string(g.var_features.cols()) +
                         ", " + std::to_string(g.cons_features.cols()) +
                         ", 1) do not match model input widths (" +
                         std::to_string(d.var_in) + ", " + std::to_string(d.cons_in) +
                         ", " + std::to_string(d.edge_in) + ")");
  }
}

VectorXd RunForward(const GatParams& p, const BipartiteGraph& g, ForwardCache& c) {
  CheckWidths(p, g);
  const int L = p.dims().hidden;
  const int ne = static_cast<int>(g.edges.size());
  c.xv = g.var_features;
  c.xc = g.cons_features;
  c.xe.resize(ne, 1);
  c.var_to_cons.src.resize(ne);
  c.var_to_cons.dst.resize(ne);
  for (int x = 0; x < ne; ++x) {
    c.xe(x, 0) = g.edges[x].feature;
    c.var_to_cons.src[x] = g.edges[x].var;
    c.var_to_cons.dst[x] = g.edges[x].cons;
  }
  c.cons_to_var.src = c.var_to_cons.dst;
  c.cons_to_var.dst = c.var_to_cons.src;
  const GatDims& d = p.dims();
  c.hv0 = (c.xv * p.Mat(p.var_w, d.var_in, L)).rowwise() +
          p.Mat(p.var_b, L, 1).col(0).transpose();
  c.hc0 = (c.xc * p.Mat(p.cons_w, d.cons_in, L)).rowwise() +
          p.Mat(p.cons_b, L, 1).col(0).transpose();
  c.he = (c.xe * p.Mat(p.edge_w, d.edge_in, L)).rowwise() +
         p.Mat(p.edge_b, L, 1).col(0).transpose();
  c.hc1 = AttnForward(p, 0, c.hv0, c.hc0, c.he, c.var_to_cons, &c.r1);
  c.hv1 = AttnForward(p, 1, c.hc1, c.hv0, c.he, c.cons_to_var, &c.r2);
  c.z1 = (c.hv1 * p.Mat(p.out_w1, L, L)).rowwise() + p.Mat(p.out_b1, L, 1).col(0).transpose();
  c.logits = LeakyM(c.z1) * p.Mat(p.out_w2, L, 1).col(0);
  c.logits.array() += p.data()[p.out_b2];
  c.int_index.clear();
  for (int j = 0; j < g.num_vars(); ++j) {
    if (g.integer_mask[j]) c.int_index.push_back(j);
  }
  return c.logits;
}

void CheckLabels(const TrainingSample& sample, std::size_t num_int) {
  if (static_cast<std::size_t>(sample.num_integer) != num_int) {
    throw DimensionError("sample has |I| = " + std::to_string(sample.num_integer) +
                         " but the graph has " + std::to_string(num_int) +
                         " integer variables");
  }
  for (const auto& row : sample.labels) {
    if (row.size() != num_int) {
      throw DimensionError("label vector length " + std::to_string(row.size()) +
                           " != " + std::to_string(num_int));
    }
  }
}

template <typename T>
void PutLe(std::string& out, T value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

template <typename T>
T GetLe(std::string_view bytes, std::size_t& pos, const char* what) {
  if (pos + sizeof(T) > bytes.size()) {
    throw ParseError(std::string("checkpoint truncated while reading ") + what);
  }
  std::uint64_t bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + b])) << (8 * b);
  }
  pos += sizeof(T);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

}  // namespace

void GatDims::Validate() const {
  if (hidden <= 0 || heads <= 0 || var_in <= 0 || cons_in <= 0 || edge_in <= 0 ||
      identity_bits < 0) {
    throw DimensionError("model dimensions must be positive");
  }
  if (hidden % heads != 0) {
    throw DimensionError("hidden width L=" + std::to_string(hidden) +
                         " must be divisible by heads H=" + std::to_string(heads));
  }
  if (edge_in != kEdgeFeatures) throw DimensionError("edge input width must be 1");
}

std::int64_t ParameterCount(const GatDims& d) {
  const std::int64_t L = d.hidden, H = d.heads;
  return (d.var_in + d.cons_in + d.edge_in + 3) * L + 2 * (H * (3 * L * L + L) + H * L * L) +
         L * L + 2 * L + 1;
}

GatParams::GatParams(const GatDims& dims) : dims_(dims) {
  dims.Validate();
  const std::size_t L = dims.hidden;
  std::size_t at = 0;
  auto take = [&](std::size_t count) {
    const std::size_t o = at;
    at += count;
    return o;
  };
  var_w = take(dims.var_in * L);
  var_b = take(L);
  cons_w = take(dims.cons_in * L);
  cons_b = take(L);
  edge_w = take(dims.edge_in * L);
  edge_b = take(L);
  for (RoundOffsets& r : rounds) {
    r.heads.resize(dims.heads);
    for (HeadOffsets& h : r.heads) {
      h.w_src = take(L * L);
      h.w_dst = take(L * L);
      h.w_edge = take(L * L);
      h.att = take(L);
    }
    r.w_merge = take(dims.heads * L * L);
  }
  out_w1 = take(L * L);
  out_b1 = take(L);
  out_w2 = take(L);
  out_b2 = take(1);
  data_.assign(at, 0.0);
  if (static_cast<std::int64_t>(at) != ParameterCount(dims)) {
    throw DimensionError("parameter layout disagrees with the closed-form count");
  }
}

GatParams InitParams(const GatDims& dims, std::uint64_t seed) {
  GatParams p(dims);
  Rng rng(DeriveSeed(seed, "gat-init"));
  const int L = dims.hidden;
  auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t k = 0; k < count; ++k) p.data()[offset + k] = rng.Uniform(-bound, bound);
  };
  fill(p.var_w, dims.var_in * L, dims.var_in);
  fill(p.cons_w, dims.cons_in * L, dims.cons_in);
  fill(p.edge_w, dims.edge_in * L, dims.edge_in);
  for (const auto& r : p.rounds) {
    for (const auto& h : r.heads) {
      fill(h.w_src, L * L, L);
      fill(h.w_dst, L * L, L);
      fill(h.w_edge, L * L, L);
      fill(h.att, L, L);
    }
    fill(r.w_merge, dims.heads * L * L, dims.heads * L);
  }
  fill(p.out_w1, L * L, L);
  fill(p.out_w2, L, L);
  return p;
}

Prediction Forward(const GatParams& params, const BipartiteGraph& graph) {
  ForwardCache cache;
  const VectorXd logits = RunForward(params, graph, cache);
  Prediction pred;
  pred.scores.assign(graph.num_vars(), 0.0);
  pred.valid.assign(graph.num_vars(), 0);
  for (int j : cache.int_index) {
    pred.scores[j] = Sigmoid(logits(j));
    pred.valid[j] = 1;
  }
  return pred;
}

double ForwardWork(const GatDims& d, const BipartiteGraph& graph) {
  const double n = graph.num_vars(), m = graph.num_cons();
  const double e = static_cast<double>(graph.edges.size());
  const double L = d.hidden, H = d.heads;
  const double embed = (n * d.var_in + m * d.cons_in + e * d.edge_in) * L;
  const double attention = 2.0 * H * ((n + m + e) * L * L + 3.0 * e * L);
  const double merge = (n + m) * H * L * L;
  const double head = n * (L * L + L);
  return embed + attention + merge + head;
}

double BceLoss(const Prediction& pred, const TrainingSample& sample) {
  std::vector<double> yhat;
  for (std::size_t j = 0; j < pred.scores.size(); ++j) {
    if (pred.valid[j]) yhat.push_back(std::clamp(pred.scores[j], kBceClip, 1.0 - kBceClip));
  }
  CheckLabels(sample, yhat.size());
  double loss = 0.0;
  for (const auto& row : sample.labels) {
    for (std::size_t i = 0; i < yhat.size(); ++i) {
      loss -= row[i] ? std::log(yhat[i]) : std::log(1.0 - yhat[i]);
    }
  }
  return loss;
}

GatParams Gradient(const GatParams& params, const BipartiteGraph& graph,
                   const TrainingSample& sample, double* loss) {
  ForwardCache c;
  const VectorXd logits = RunForward(params, graph, c);
  CheckLabels(sample, c.int_index.size());
  const GatDims& d = params.dims();
  const int L = d.hidden;
  const int n = graph.num_vars();

  // dLoss/dlogit: (U yhat - ones) where the clip is inactive, else 0.
  VectorXd d_logit = VectorXd::Zero(n);
  double total = 0.0;
  const double num_labels = static_cast<double>(sample.labels.size());
  for (std::size_t i = 0; i < c.int_index.size(); ++i) {
    const int j = c.int_index[i];
    const double y = Sigmoid(logits(j));
    const double yc = std::clamp(y, kBceClip, 1.0 - kBceClip);
    double ones = 0.0;
    for (const auto& row : sample.labels) ones += row[i];
    total -= ones * std::log(yc) + (num_labels - ones) * std::log(1.0 - yc);
    if (y > kBceClip && y < 1.0 - kBceClip) d_logit(j) = num_labels * y - ones;
  }
  if (loss != nullptr) *loss = total;

  GatParams grad(d);
  const MatrixXd a1 = LeakyM(c.z1);
  grad.Mat(grad.out_w2, L, 1).col(0) = a1.transpose() * d_logit;
  grad.data()[grad.out_b2] = d_logit.sum();
  const MatrixXd d_z1 =
      (d_logit * params.Mat(params.out_w2, L, 1).col(0).transpose()).cwiseProduct(LeakyGradM(c.z1));
  grad.Mat(grad.out_w1, L, L) = c.hv1.transpose() * d_z1;
  grad.Mat(grad.out_b1, L, 1).col(0) = d_z1.colwise().sum().transpose();
  const MatrixXd d_hv1 = d_z1 * params.Mat(params.out_w1, L, L).transpose();

  MatrixXd d_hc1 = MatrixXd::Zero(c.hc1.rows(), L);
  MatrixXd d_hv0 = MatrixXd::Zero(c.hv0.rows(), L);
  MatrixXd d_hc0 = MatrixXd::Zero(c.hc0.rows(), L);
  MatrixXd d_he = MatrixXd::Zero(c.he.rows(), L);
  AttnBackward(params, grad, 1, c.hc1, c.hv0, c.he, c.cons_to_var, c.r2, d_hv1, d_hc1, d_hv0,
               d_he);
  AttnBackward(params, grad, 0, c.hv0, c.hc0, c.he, c.var_to_cons, c.r1, d_hc1, d_hv0, d_hc0,
               d_he);
  grad.Mat(grad.var_w, d.var_in, L) = c.xv.transpose() * d_hv0;
  grad.Mat(grad.var_b, L, 1).col(0) = d_hv0.colwise().sum().transpose();
  grad.Mat(grad.cons_w, d.cons_in, L) = c.xc.transpose() * d_hc0;
  grad.Mat(grad.cons_b, L, 1).col(0) = d_hc0.colwise().sum().transpose();
  grad.Mat(grad.edge_w, d.edge_in, L) = c.xe.transpose() * d_he;
  grad.Mat(grad.edge_b, L, 1).col(0) = d_he.colwise().sum().transpose();
  return grad;
}

void AdamStep(GatParams& params, const GatParams& grad, AdamState& state, double lr) {
  const std::size_t n = params.size();
  if (grad.size() != n || !(grad.dims() == params.dims())) {
    throw DimensionError("gradient shape does not match parameters");
  }
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  if (state.m.size() != n || state.v.size() != n) {
    throw DimensionError("optimizer state shape does not match parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < n; ++k) {
    const double g = grad.data()[k];
    state.m[k] = kAdamBeta1 * state.m[k] + (1.0 - kAdamBeta1) * g;
    state.v[k] = kAdamBeta2 * state.v[k] + (1.0 - kAdamBeta2) * g * g;
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params.data()[k] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
  }
}

double MeanLoss(const GatParams& params, const std::vector<TrainExample>& examples) {
  if (examples.empty()) return 0.0;
  double sum = 0.0;
  for (const TrainExample& ex : examples) sum += BceLoss(Forward(params, ex.graph), ex.sample);
  return sum / static_cast<double>(examples.size());
}

TrainResult Train(const std::vector<TrainExample>& train,
                  const std::vector<TrainExample>& validation, const GatDims& dims,
                  const TrainConfig& cfg) {
  if (train.empty() || validation.empty()) {
    throw ConfigError("training needs non-empty train and validation sets");
  }
  if (cfg.batch_size < 1 || cfg.max_steps < 1 || !(cfg.lr > 0.0)) {
    throw ConfigError("training needs batch_size >= 1, max_steps >= 1, lr > 0");
  }
  GatParams params = InitParams(dims, cfg.seed);
  AdamState state;
  TrainResult result;
  result.initial_train_loss = MeanLoss(params, train);
  result.best = params;
  result.best_val_loss = MeanLoss(params, validation);
  result.best_step = 0;
  result.curve.push_back({0, 0, result.initial_train_loss, result.best_val_loss});

  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::int64_t step = 0;
  for (int epoch = 1; step < cfg.max_steps; ++epoch) {
    Rng rng(DeriveSeed(cfg.seed, "train-shuffle", static_cast<std::uint64_t>(epoch)));
    rng.Shuffle(std::span<int>(order));
    double epoch_loss = 0.0;
    int epoch_count = 0;
    for (std::size_t start = 0; start < order.size() && step < cfg.max_steps;
         start += cfg.batch_size) {
      GatParams batch_grad(dims);
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t b = start; b < end; ++b) {
        const TrainExample& ex = train[order[b]];
        double loss = 0.0;
        GatParams g = Gradient(params, ex.graph, ex.sample, &loss);
        if (!std::isfinite(loss)) {
          throw NumericalError("training diverged: loss is " + std::to_string(loss) +
                               " at step " + std::to_string(step) + " on " +
                               ex.sample.instance_ref);
        }
        for (std::size_t k = 0; k < g.size(); ++k) batch_grad.data()[k] += g.data()[k];
        epoch_loss += loss;
        ++epoch_count;
      }
      for (double v : batch_grad.data()) {
        if (!std::isfinite(v)) {
          throw NumericalError("training diverged: non-finite gradient at step " +
                               std::to_string(step));
        }
      }
      AdamStep(params, batch_grad, state, cfg.lr);
      ++step;
    }
    const double val = MeanLoss(params, validation);
    if (!std::isfinite(val)) {
      throw NumericalError("training diverged: validation loss is " + std::to_string(val) +
                           " after step " + std::to_string(step));
    }
    result.curve.push_back({step, epoch, epoch_loss / std::max(1, epoch_count), val});
    if (val < result.best_val_loss) {
      result.best_val_loss = val;
      result.best = params;
      result.state = state;
      result.best_step = step;
    }
  }
  return result;
}

std::string CurveCsv(const std::vector<CurvePoint>& curve) {
  std::string out = "step,epoch,train_loss,val_loss\n";
  char buf[128];
  for (const CurvePoint& c : curve) {
    std::snprintf(buf, sizeof(buf), "%lld,%d,%.10g,%.10g\n", static_cast<long long>(c.step),
                  c.epoch, c.train_loss, c.val_loss);
    out += buf;
  }
  return out;
}

std::string EncodeCheckpoint(const GatParams& params, const AdamState& state) {
  const GatDims& d = params.dims();
  std::string out(kCheckpointMagic, 4);
  PutLe<std::uint32_t>(out, kCheckpointVersion);
  for (int v : {d.hidden, d.heads, d.var_in, d.cons_in, d.edge_in, d.identity_bits}) {
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(v));
  }
  PutLe<std::int64_t>(out, state.step);
  PutLe<std::uint64_t>(out, params.size());
  for (double v : params.data()) PutLe<double>(out, v);
  for (std::size_t k = 0; k < params.size(); ++k) {
    PutLe<double>(out, state.m.empty() ? 0.0 : state.m[k]);
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    PutLe<double>(out, state.v.empty() ? 0.0 : state.v[k]);
  }
  return out;
}

void DecodeCheckpoint(std::string_view bytes, GatParams* params, AdamState* state) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kCheckpointMagic, 4)) {
    throw ParseError("not a model checkpoint (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = GetLe<std::uint32_t>(bytes, pos, "version");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  GatDims d;
  d.hidden = static_cast<int>(GetLe<std::uint32_t>(bytes, pos, "dims"));
  d.heads = static_cast<int>(GetLe<std::uint32_t>(bytes, pos, "dims"));
  d.var_in = static_cast<int>(GetLe<std::uint32_t>(bytes, pos, "dims"));
  d.cons_in = static_cast<int>(GetLe<std::uint32_t>(bytes, pos, "dims"));
  d.edge_in = static_cast<int>(GetLe<std::uint32_t>(bytes, pos, "dims"));
  d.identity_bits = static_cast<int>(GetLe<std::uint32_t>(bytes, pos, "dims"));
  try {
    d.Validate();
  } catch (const DimensionError& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  AdamState st;
  st.step = GetLe<std::int64_t>(bytes, pos, "step");
  const auto count = GetLe<std::uint64_t>(bytes, pos, "parameter count");
  if (static_cast<std::int64_t>(count) != ParameterCount(d)) {
    throw ParseError("checkpoint parameter count " + std::to_string(count) +
                     " does not match its dims");
  }
  if (bytes.size() - pos != 3 * count * sizeof(double)) {
    throw ParseError("checkpoint body has wrong length");
  }
  GatParams p(d);
  for (auto& v : p.data()) v = GetLe<double>(bytes, pos, "parameters");
  st.m.resize(count);
  st.v.resize(count);
  for (auto& v : st.m) v = GetLe<double>(bytes, pos, "moments");
  for (auto& v : st.v) v = GetLe<double>(bytes, pos, "moments");
  *params = std::move(p);
  if (state != nullptr) *state = std::move(st);
}

void SaveCheckpoint(const std::filesystem::path& path, const GatParams& params,
                    const AdamState& state) {
  WriteFileAtomic(path, EncodeCheckpoint(params, state));
}

GatParams LoadCheckpoint(const std::filesystem::path& path, AdamState* state,
                         const GatDims* expected) {
  GatParams params;
  DecodeCheckpoint(ReadFile(path), &params, state);
  if (expected != nullptr && !(params.dims() == *expected)) {
    const GatDims& d = params.dims();
    throw DimensionError(
        "checkpoint " + path.string() + " has dims L=" + std::to_string(d.hidden) +
        " H=" + std::to_string(d.heads) + " var_in=" + std::to_string(d.var_in) +
        " B=" + std::to_string(d.identity_bits) + ", expected L=" +
        std::to_string(expected->hidden) + " H=" + std::to_string(expected->heads) +
        " var_in=" + std::to_string(expected->var_in) +
        " B=" + std::to_string(expected->identity_bits));
  }
  return params;
}

}  // namespace idpas
