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

#ifndef IDPAS_INSTANCE_GEN_H_
#define IDPAS_INSTANCE_GEN_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "idpas/mip.h"

namespace idpas {

enum class Family { kMmcnpLite, kSlapLite };

std::string_view ToString(Family family);
Family ParseFamily(std::string_view text);

// Consolidation network design: vendors ship commodities to fulfillment
// centers (FC) and last-mile delivery stations (LMD) over truck arcs. Arcs
// are (tail, head, truck type) triples.
struct MmcnpParams {
  int vendors = 2;
  int fcs = 3;
  int lmds = 3;
  int truck_types = 2;
  int arcs = 60;
  int commodities = 12;
  int max_paths = 200;
  int max_paths_per_commodity = 16;
  int max_hops = 3;
  bool direct_arcs = true;   // vendor -> LMD
  bool lateral_arcs = true;  // LMD -> LMD
  std::vector<double> truck_capacity = {10.0, 25.0};
  std::vector<double> truck_cost = {40.0, 80.0};
  double unit_cost_per_distance = 1.0;
  double demand_min = 4.0;
  double demand_max = 16.0;
  // Demand draw: Normal(ref, sigma_frac * ref) clamped to
  // [clamp_lo_frac * ref, clamp_hi_frac * ref].
  double sigma_frac = 0.2;
  double clamp_lo_frac = 0.5;
  double clamp_hi_frac = 1.5;
};

// Weekly locomotive flow on a cyclic time-space network of stations x slots
// with train arcs (bounded locomotive counts), wait arcs, and light-travel
// arcs (locomotives moving without a train, grouped into light trains).
struct SlapParams {
  int stations = 5;
  int slots = 4;
  int train_arcs = 30;
  int arcs = 80;  // train + wait + light
  int hub_stations = 2;
  int max_locomotives = 4;   // cap for train-arc bounds
  int light_train_capacity = 3;
  double train_cost = 1.0;
  double wait_cost = 0.1;
  double light_cost = 2.0;
  double light_train_cost = 20.0;
  double fleet_cost = 50.0;
  // Bound draw: each reference bound is redrawn Uniform(ref - spread,
  // ref + spread), rounded, clamped to [0, max_locomotives], then sorted.
  double bound_spread = 1.0;
};

struct FamilyConfig {
  Family family = Family::kMmcnpLite;
  std::uint64_t structure_seed = 1;
  int identity_bits = 16;
  MmcnpParams mmcnp;
  SlapParams slap;

  // Throws ConfigError.
  void Validate() const;
};

std::string SerializeFamilyConfig(const FamilyConfig& cfg);
FamilyConfig ParseFamilyConfig(std::string_view text);

enum class ArcKind { kTruck, kTrain, kWait, kLight };

struct NetworkArc {
  int tail = 0;
  int head = 0;
  ArcKind kind = ArcKind::kTruck;
  int type = 0;  // truck type (MMCNP)
  double capacity = 0.0;
  double fixed_cost = 0.0;
  double unit_cost = 0.0;
  // SLAP train arcs: reference locomotive bounds.
  int ref_lower = 0;
  int ref_upper = 0;

  friend bool operator==(const NetworkArc&, const NetworkArc&) = default;
};

struct Commodity {
  int origin = 0;
  int destination = 0;
  double ref_demand = 0.0;
  std::vector<int> paths;

  friend bool operator==(const Commodity&, const Commodity&) = default;
};

struct NetworkPath {
  int commodity = 0;
  std::vector<int> arcs;
  double unit_cost = 0.0;

  friend bool operator==(const NetworkPath&, const NetworkPath&) = default;
};

// Fixed structure shared by every instance of a family configuration.
struct ReferenceNetwork {
  Family family = Family::kMmcnpLite;
  std::vector<std::string> node_names;
  std::vector<NetworkArc> arcs;
  std::vector<Commodity> commodities;  // MMCNP
  std::vector<NetworkPath> paths;      // MMCNP

  friend bool operator==(const ReferenceNetwork&, const ReferenceNetwork&) = default;
};

struct PerturbationDraw {
  std::int64_t instance_seed = 0;
  // MMCNP: one demand per commodity. SLAP: (lower, upper) per train arc,
  // interleaved, in train-arc order.
  std::vector<double> values;
};

// Throws ConfigError when path enumeration exceeds max_paths.
ReferenceNetwork BuildReferenceNetwork(const FamilyConfig& cfg);

PerturbationDraw SamplePerturbation(const FamilyConfig& cfg,
                                    const ReferenceNetwork& net,
                                    std::int64_t instance_seed);
// Zero-perturbation draw.
PerturbationDraw ReferenceDraw(const FamilyConfig& cfg,
                               const ReferenceNetwork& net);

MipInstance BuildInstance(const FamilyConfig& cfg, const ReferenceNetwork& net,
                          const PerturbationDraw& draw);

// A feasible point for the instance built from `draw`, constructed from the
// network (cheapest-path routing / return cycles). Throws ValidationError if
// the construction is infeasible.
std::vector<double> ReferenceSolution(const FamilyConfig& cfg,
                                      const ReferenceNetwork& net,
                                      const PerturbationDraw& draw);

// BuildInstance(SamplePerturbation(...)) with the constructed reference
// point checked for feasibility.
MipInstance GenerateInstance(const FamilyConfig& cfg, std::int64_t instance_seed);

}  // namespace idpas

#endif  // IDPAS_INSTANCE_GEN_H_
