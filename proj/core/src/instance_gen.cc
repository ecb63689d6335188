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

#include "idpas/instance_gen.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <array>
#include <map>
#include <set>
#include <span>
#include <sstream>

#include "idpas/errors.h"
#include "idpas/rng.h"
#include "json.hpp"

namespace idpas {
namespace {

using nlohmann::json;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double Distance(const Point& a, const Point& b) {
  return 10.0 * std::hypot(a.x - b.x, a.y - b.y);
}

double Round2(double v) { return std::round(v * 100.0) / 100.0; }

// ---------------------------------------------------------------- MMCNP ---

enum class Tier { kVendor, kFc, kLmd };

ReferenceNetwork BuildMmcnp(const FamilyConfig& cfg) {
  const MmcnpParams& p = cfg.mmcnp;
  Rng rng(DeriveSeed(cfg.structure_seed, "mmcnp-structure"));
  ReferenceNetwork net;
  net.family = Family::kMmcnpLite;

  std::vector<Tier> tier;
  std::vector<Point> pos;
  auto add_nodes = [&](int count, Tier t, const char* prefix, double x0) {
    for (int i = 0; i < count; ++i) {
      net.node_names.push_back(prefix + std::to_string(i));
      tier.push_back(t);
      pos.push_back({x0 + 0.3 * rng.Uniform(), rng.Uniform()});
    }
  };
  add_nodes(p.vendors, Tier::kVendor, "V", 0.0);
  add_nodes(p.fcs, Tier::kFc, "F", 0.35);
  add_nodes(p.lmds, Tier::kLmd, "D", 0.7);
  const int num_nodes = static_cast<int>(tier.size());

  struct Candidate {
    int tail, head, type;
    bool mandatory;
  };
  std::vector<Candidate> candidates;
  for (int u = 0; u < num_nodes; ++u) {
    for (int v = 0; v < num_nodes; ++v) {
      if (u == v) continue;
      const Tier a = tier[u], b = tier[v];
      const bool backbone = (a == Tier::kVendor && b == Tier::kFc) ||
                            (a == Tier::kFc && b == Tier::kLmd);
      const bool allowed = backbone || (a == Tier::kFc && b == Tier::kFc) ||
                           (p.direct_arcs && a == Tier::kVendor && b == Tier::kLmd) ||
                           (p.lateral_arcs && a == Tier::kLmd && b == Tier::kLmd);
      if (!allowed) continue;
      for (int t = 0; t < p.truck_types; ++t) {
        candidates.push_back({u, v, t, backbone && t == 0});
      }
    }
  }
  std::vector<int> chosen;
  std::vector<int> optional;
  for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
    (candidates[c].mandatory ? chosen : optional).push_back(c);
  }
  rng.Shuffle(std::span<int>(optional));
  const int extra = std::max(0, p.arcs - static_cast<int>(chosen.size()));
  for (int k = 0; k < extra && k < static_cast<int>(optional.size()); ++k) {
    chosen.push_back(optional[k]);
  }
  std::sort(chosen.begin(), chosen.end());
  for (int c : chosen) {
    const Candidate& cand = candidates[c];
    const double dist = Distance(pos[cand.tail], pos[cand.head]);
    NetworkArc arc;
    arc.tail = cand.tail;
    arc.head = cand.head;
    arc.kind = ArcKind::kTruck;
    arc.type = cand.type;
    arc.capacity = p.truck_capacity[cand.type];
    arc.fixed_cost = Round2(p.truck_cost[cand.type] * (1.0 + 0.1 * dist));
    arc.unit_cost = Round2(p.unit_cost_per_distance * dist);
    net.arcs.push_back(arc);
  }

  // Origin-destination pairs: vendor->LMD first, then vendor->FC.
  std::vector<std::pair<int, int>> to_lmd, to_fc;
  for (int u = 0; u < num_nodes; ++u) {
    if (tier[u] != Tier::kVendor) continue;
    for (int v = 0; v < num_nodes; ++v) {
      if (tier[v] == Tier::kLmd) to_lmd.emplace_back(u, v);
      if (tier[v] == Tier::kFc) to_fc.emplace_back(u, v);
    }
  }
  rng.Shuffle(std::span<std::pair<int, int>>(to_lmd));
  rng.Shuffle(std::span<std::pair<int, int>>(to_fc));
  std::vector<std::pair<int, int>> pairs(to_lmd);
  pairs.insert(pairs.end(), to_fc.begin(), to_fc.end());
  if (pairs.empty()) throw ConfigError("MMCNP network has no vendor destinations");

  std::vector<std::vector<int>> out_arcs(num_nodes);
  for (int a = 0; a < static_cast<int>(net.arcs.size()); ++a) {
    out_arcs[net.arcs[a].tail].push_back(a);
  }
  for (int k = 0; k < p.commodities; ++k) {
    Commodity com;
    com.origin = pairs[k % pairs.size()].first;
    com.destination = pairs[k % pairs.size()].second;
    com.ref_demand = Round2(rng.Uniform(p.demand_min, p.demand_max));

    std::vector<std::vector<int>> found;
    std::vector<int> stack;
    std::vector<char> visited(num_nodes, 0);
    std::function<void(int)> dfs = [&](int node) {
      if (node == com.destination) {
        found.push_back(stack);
        return;
      }
      if (static_cast<int>(stack.size()) >= p.max_hops) return;
      visited[node] = 1;
      for (int a : out_arcs[node]) {
        const int next = net.arcs[a].head;
        if (visited[next]) continue;
        stack.push_back(a);
        dfs(next);
        stack.pop_back();
      }
      visited[node] = 0;
    };
    dfs(com.origin);
    if (found.empty()) {
      throw ConfigError("commodity " + std::to_string(k) + " (" +
                        net.node_names[com.origin] + "->" +
                        net.node_names[com.destination] + ") has no path");
    }
    auto cost_of = [&](const std::vector<int>& arcs) {
      double c = 0.0;
      for (int a : arcs) c += net.arcs[a].unit_cost;
      return c;
    };
    std::stable_sort(found.begin(), found.end(),
                     [&](const auto& x, const auto& y) {
                       const double cx = cost_of(x), cy = cost_of(y);
                       if (cx != cy) return cx < cy;
                       return x < y;
                     });
    if (static_cast<int>(found.size()) > p.max_paths_per_commodity) {
      found.resize(p.max_paths_per_commodity);
    }
    for (auto& arcs : found) {
      com.paths.push_back(static_cast<int>(net.paths.size()));
      net.paths.push_back({k, arcs, Round2(cost_of(arcs))});
    }
    net.commodities.push_back(std::move(com));
    if (static_cast<int>(net.paths.size()) > p.max_paths) {
      throw ConfigError("path enumeration produced more than max_paths=" +
                        std::to_string(p.max_paths) +
                        " paths; reduce commodities, arcs, or max_hops");
    }
  }
  return net;
}

MipInstance BuildMmcnpInstance(const FamilyConfig& cfg, const ReferenceNetwork& net,
                               const PerturbationDraw& draw) {
  const MmcnpParams& p = cfg.mmcnp;
  MipInstance inst;
  const int num_arcs = static_cast<int>(net.arcs.size());
  std::vector<double> arc_load(num_arcs, 0.0);
  for (const NetworkPath& path : net.paths) {
    const double hi = p.clamp_hi_frac * net.commodities[path.commodity].ref_demand;
    for (int a : path.arcs) arc_load[a] += hi;
  }
  // Each commodity contributes at most once per arc to the truck bound.
  std::vector<double> arc_bound_load(num_arcs, 0.0);
  for (const Commodity& com : net.commodities) {
    std::set<int> arcs;
    for (int pi : com.paths) arcs.insert(net.paths[pi].arcs.begin(), net.paths[pi].arcs.end());
    for (int a : arcs) arc_bound_load[a] += p.clamp_hi_frac * com.ref_demand;
  }
  for (int a = 0; a < num_arcs; ++a) {
    const NetworkArc& arc = net.arcs[a];
    const double ub = std::max(1.0, std::ceil(arc_bound_load[a] / arc.capacity - 1e-9));
    inst.AddVariable("y_" + net.node_names[arc.tail] + "_" + net.node_names[arc.head] +
                         "_t" + std::to_string(arc.type),
                     VarKind::kGeneralInteger, 0.0, ub, arc.fixed_cost);
  }
  std::vector<std::vector<Term>> capacity_terms(num_arcs);
  for (int pi = 0; pi < static_cast<int>(net.paths.size()); ++pi) {
    const NetworkPath& path = net.paths[pi];
    const double hi = p.clamp_hi_frac * net.commodities[path.commodity].ref_demand;
    const int var = inst.AddVariable(
        "f_" + std::to_string(path.commodity) + "_" + std::to_string(pi),
        VarKind::kContinuous, 0.0, hi, path.unit_cost);
    for (int a : path.arcs) capacity_terms[a].push_back({var, 1.0});
  }
  for (int k = 0; k < static_cast<int>(net.commodities.size()); ++k) {
    std::vector<Term> terms;
    for (int pi : net.commodities[k].paths) terms.push_back({num_arcs + pi, 1.0});
    inst.AddRow(std::move(terms), RowSense::kEq, draw.values[k]);
  }
  for (int a = 0; a < num_arcs; ++a) {
    std::vector<Term> terms = std::move(capacity_terms[a]);
    terms.push_back({a, -net.arcs[a].capacity});
    inst.AddRow(std::move(terms), RowSense::kLe, 0.0);
  }
  return inst;
}

std::vector<double> MmcnpReferenceSolution(const ReferenceNetwork& net,
                                           const MipInstance& inst,
                                           const PerturbationDraw& draw) {
  const int num_arcs = static_cast<int>(net.arcs.size());
  std::vector<double> x(inst.num_vars(), 0.0);
  std::vector<double> load(num_arcs, 0.0);
  for (int k = 0; k < static_cast<int>(net.commodities.size()); ++k) {
    const int pi = net.commodities[k].paths.front();  // cheapest path
    x[num_arcs + pi] = draw.values[k];
    for (int a : net.paths[pi].arcs) load[a] += draw.values[k];
  }
  for (int a = 0; a < num_arcs; ++a) {
    x[a] = std::ceil(load[a] / net.arcs[a].capacity - 1e-9);
  }
  return x;
}

// ----------------------------------------------------------------- SLAP ---

ReferenceNetwork BuildSlap(const FamilyConfig& cfg) {
  const SlapParams& p = cfg.slap;
  Rng rng(DeriveSeed(cfg.structure_seed, "slap-structure"));
  ReferenceNetwork net;
  net.family = Family::kSlapLite;
  std::vector<Point> station(p.stations);
  for (auto& s : station) s = {rng.Uniform(), rng.Uniform()};
  auto node = [&](int s, int t) { return s * p.slots + ((t % p.slots) + p.slots) % p.slots; };
  for (int s = 0; s < p.stations; ++s) {
    for (int t = 0; t < p.slots; ++t) {
      net.node_names.push_back("S" + std::to_string(s) + "T" + std::to_string(t));
    }
  }
  // Train arcs (s,t) -> (s',t+1), s != s'.
  std::vector<std::array<int, 3>> train_candidates;
  for (int s = 0; s < p.stations; ++s) {
    for (int t = 0; t < p.slots; ++t) {
      for (int s2 = 0; s2 < p.stations; ++s2) {
        if (s2 != s) train_candidates.push_back({s, t, s2});
      }
    }
  }
  rng.Shuffle(std::span<std::array<int, 3>>(train_candidates));
  train_candidates.resize(std::min<std::size_t>(train_candidates.size(), p.train_arcs));
  std::sort(train_candidates.begin(), train_candidates.end());

  std::map<std::pair<int, int>, NetworkArc> light;  // keyed by (tail, head)
  auto light_arc = [&](int s, int t, int s2) {
    NetworkArc arc;
    arc.tail = node(s, t);
    arc.head = node(s2, t + 1);
    arc.kind = ArcKind::kLight;
    arc.capacity = p.light_train_capacity;
    arc.unit_cost = Round2(p.light_cost * (1.0 + Distance(station[s], station[s2]) / 10.0));
    arc.fixed_cost = p.light_train_cost;
    return arc;
  };
  for (const auto& [s, t, s2] : train_candidates) {
    NetworkArc arc;
    arc.tail = node(s, t);
    arc.head = node(s2, t + 1);
    arc.kind = ArcKind::kTrain;
    arc.unit_cost = Round2(p.train_cost * (1.0 + Distance(station[s], station[s2]) / 10.0));
    const std::uint64_t r = rng.UniformInt(4);
    arc.ref_lower = r < 2 ? 0 : static_cast<int>(r - 1);
    arc.ref_upper = std::min(p.max_locomotives,
                             arc.ref_lower + 1 + static_cast<int>(rng.UniformInt(3)));
    arc.ref_lower = std::min(arc.ref_lower, arc.ref_upper);
    net.arcs.push_back(arc);
    // Return move used by the reference construction.
    NetworkArc back = light_arc(s2, t + 1, s);
    light.emplace(std::make_pair(back.tail, back.head), back);
  }
  for (int s = 0; s < p.stations; ++s) {
    for (int t = 0; t < p.slots; ++t) {
      NetworkArc arc;
      arc.tail = node(s, t);
      arc.head = node(s, t + 1);
      arc.kind = ArcKind::kWait;
      arc.unit_cost = p.wait_cost;
      net.arcs.push_back(arc);
    }
  }
  std::vector<std::array<int, 3>> extra;
  for (int s = 0; s < p.stations; ++s) {
    for (int t = 0; t < p.slots; ++t) {
      for (int s2 = 0; s2 < p.stations; ++s2) {
        if (s2 != s && !light.count({node(s, t), node(s2, t + 1)})) {
          extra.push_back({s, t, s2});
        }
      }
    }
  }
  rng.Shuffle(std::span<std::array<int, 3>>(extra));
  for (const auto& [s, t, s2] : extra) {
    if (static_cast<int>(net.arcs.size() + light.size()) >= p.arcs) break;
    NetworkArc arc = light_arc(s, t, s2);
    light.emplace(std::make_pair(arc.tail, arc.head), arc);
  }
  for (const auto& [key, arc] : light) net.arcs.push_back(arc);
  return net;
}

int SlapArcBound(const SlapParams& p) {
  return p.max_locomotives * p.train_arcs + p.hub_stations;
}

MipInstance BuildSlapInstance(const FamilyConfig& cfg, const ReferenceNetwork& net,
                              const PerturbationDraw& draw) {
  const SlapParams& p = cfg.slap;
  MipInstance inst;
  const int num_arcs = static_cast<int>(net.arcs.size());
  const double big = SlapArcBound(p);
  int train = 0;
  std::vector<int> crossing;
  for (int a = 0; a < num_arcs; ++a) {
    const NetworkArc& arc = net.arcs[a];
    double lb = 0.0, ub = big;
    std::string prefix = "w_";
    if (arc.kind == ArcKind::kTrain) {
      lb = draw.values[2 * train];
      ub = draw.values[2 * train + 1];
      ++train;
      prefix = "x_";
    } else if (arc.kind == ArcKind::kLight) {
      prefix = "l_";
    }
    inst.AddVariable(prefix + net.node_names[arc.tail] + "_" + net.node_names[arc.head],
                     VarKind::kGeneralInteger, lb, ub, arc.unit_cost);
    if (arc.head % p.slots == 0) crossing.push_back(a);
  }
  std::vector<int> light_train_var(num_arcs, -1);
  for (int a = 0; a < num_arcs; ++a) {
    const NetworkArc& arc = net.arcs[a];
    if (arc.kind != ArcKind::kLight) continue;
    light_train_var[a] = inst.AddVariable(
        "t_" + net.node_names[arc.tail] + "_" + net.node_names[arc.head],
        VarKind::kGeneralInteger, 0.0, std::ceil(big / arc.capacity), arc.fixed_cost);
  }
  const int fleet = inst.AddVariable("fleet", VarKind::kGeneralInteger, 0.0,
                                     big * static_cast<double>(crossing.size()),
                                     p.fleet_cost);
  // Flow balance per time-space node.
  const int num_nodes = static_cast<int>(net.node_names.size());
  std::vector<std::vector<Term>> balance(num_nodes);
  for (int a = 0; a < num_arcs; ++a) {
    balance[net.arcs[a].head].push_back({a, 1.0});
    balance[net.arcs[a].tail].push_back({a, -1.0});
  }
  for (auto& terms : balance) inst.AddRow(std::move(terms), RowSense::kEq, 0.0);
  for (int a = 0; a < num_arcs; ++a) {
    if (light_train_var[a] < 0) continue;
    inst.AddRow({{a, 1.0}, {light_train_var[a], -net.arcs[a].capacity}},
                RowSense::kLe, 0.0);
  }
  std::vector<Term> fleet_terms;
  for (int a : crossing) fleet_terms.push_back({a, 1.0});
  fleet_terms.push_back({fleet, -1.0});
  inst.AddRow(std::move(fleet_terms), RowSense::kLe, 0.0);
  // Hub stations keep at least one locomotive on protect duty each week.
  for (int s = 0; s < std::min(p.hub_stations, p.stations); ++s) {
    std::vector<Term> terms;
    for (int a = 0; a < num_arcs; ++a) {
      if (net.arcs[a].kind == ArcKind::kWait && net.arcs[a].tail / p.slots == s) {
        terms.push_back({a, 1.0});
      }
    }
    inst.AddRow(std::move(terms), RowSense::kGe, 1.0);
  }
  return inst;
}

std::vector<double> SlapReferenceSolution(const FamilyConfig& cfg,
                                          const ReferenceNetwork& net,
                                          const MipInstance& inst,
                                          const PerturbationDraw& draw) {
  const SlapParams& p = cfg.slap;
  const int num_arcs = static_cast<int>(net.arcs.size());
  std::map<std::pair<int, int>, int> arc_index;
  for (int a = 0; a < num_arcs; ++a) arc_index[{net.arcs[a].tail, net.arcs[a].head}] = a;
  auto node = [&](int s, int t) { return s * p.slots + ((t % p.slots) + p.slots) % p.slots; };
  std::vector<double> x(inst.num_vars(), 0.0);
  auto add_wait_chain = [&](int s, int from_t, int steps, double count) {
    for (int k = 0; k < steps; ++k) {
      x[arc_index.at({node(s, from_t + k), node(s, from_t + k + 1)})] += count;
    }
  };
  int train = 0;
  for (int a = 0; a < num_arcs; ++a) {
    const NetworkArc& arc = net.arcs[a];
    if (arc.kind != ArcKind::kTrain) continue;
    const double count = draw.values[2 * train];
    ++train;
    if (count == 0.0) continue;
    const int s = arc.tail / p.slots, t = arc.tail % p.slots, s2 = arc.head / p.slots;
    x[a] += count;
    x[arc_index.at({node(s2, t + 1), node(s, t + 2)})] += count;
    add_wait_chain(s, t + 2, p.slots - 2, count);
  }
  for (int s = 0; s < std::min(p.hub_stations, p.stations); ++s) {
    add_wait_chain(s, 0, p.slots, 1.0);
  }
  int next = num_arcs;
  double crossing = 0.0;
  for (int a = 0; a < num_arcs; ++a) {
    if (net.arcs[a].kind == ArcKind::kLight) {
      x[next++] = std::ceil(x[a] / net.arcs[a].capacity - 1e-9);
    }
    if (net.arcs[a].head % p.slots == 0) crossing += x[a];
  }
  x[next] = crossing;
  return x;
}

// ----------------------------------------------------------- config I/O ---

template <typename T>
void Read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("family config field '") + key + "': " + e.what());
    }
  }
}

}  // namespace

std::string_view ToString(Family family) {
  return family == Family::kMmcnpLite ? "mmcnp_lite" : "slap_lite";
}

Family ParseFamily(std::string_view text) {
  if (text == "mmcnp_lite") return Family::kMmcnpLite;
  if (text == "slap_lite") return Family::kSlapLite;
  throw ConfigError("unknown family '" + std::string(text) + "'");
}

void FamilyConfig::Validate() const {
  if (identity_bits < 0 || identity_bits > 62) {
    throw ConfigError("identity_bits must lie in [0, 62]");
  }
  if (family == Family::kMmcnpLite) {
    const MmcnpParams& p = mmcnp;
    if (p.vendors <= 0 || p.fcs <= 0 || p.lmds <= 0 || p.truck_types <= 0 ||
        p.arcs <= 0 || p.commodities <= 0 || p.max_paths <= 0 ||
        p.max_paths_per_commodity <= 0 || p.max_hops <= 0) {
      throw ConfigError("MMCNP sizes must be positive");
    }
    if (static_cast<int>(p.truck_capacity.size()) < p.truck_types ||
        static_cast<int>(p.truck_cost.size()) < p.truck_types) {
      throw ConfigError("MMCNP truck_capacity/truck_cost need one entry per truck type");
    }
    for (int t = 0; t < p.truck_types; ++t) {
      if (!(p.truck_capacity[t] > 0.0)) throw ConfigError("truck capacity must be positive");
    }
    if (!(p.demand_min > 0.0 && p.demand_min <= p.demand_max)) {
      throw ConfigError("MMCNP demand range must satisfy 0 < demand_min <= demand_max");
    }
    if (!(p.sigma_frac >= 0.0 && p.clamp_lo_frac > 0.0 && p.clamp_lo_frac <= 1.0 &&
          p.clamp_hi_frac >= 1.0)) {
      throw ConfigError("MMCNP perturbation needs sigma >= 0 and clamp_lo <= 1 <= clamp_hi");
    }
  } else {
    const SlapParams& p = slap;
    if (p.stations < 2 || p.slots < 3 || p.train_arcs <= 0 || p.arcs <= 0 ||
        p.max_locomotives <= 0 || p.light_train_capacity <= 0 || p.hub_stations < 0) {
      throw ConfigError("SLAP sizes must be positive (stations >= 2, slots >= 3)");
    }
    if (p.train_arcs > p.stations * p.slots * (p.stations - 1)) {
      throw ConfigError("SLAP train_arcs exceeds the number of station pairs per slot");
    }
    if (p.bound_spread < 0.0) throw ConfigError("SLAP bound_spread must be >= 0");
  }
}

std::string SerializeFamilyConfig(const FamilyConfig& cfg) {
  const MmcnpParams& m = cfg.mmcnp;
  const SlapParams& s = cfg.slap;
  json doc = {
      {"family", std::string(ToString(cfg.family))},
      {"structure_seed", cfg.structure_seed},
      {"identity_bits", cfg.identity_bits},
      {"mmcnp",
       {{"vendors", m.vendors}, {"fcs", m.fcs}, {"lmds", m.lmds},
        {"truck_types", m.truck_types}, {"arcs", m.arcs},
        {"commodities", m.commodities}, {"max_paths", m.max_paths},
        {"max_paths_per_commodity", m.max_paths_per_commodity},
        {"max_hops", m.max_hops}, {"direct_arcs", m.direct_arcs},
        {"lateral_arcs", m.lateral_arcs}, {"truck_capacity", m.truck_capacity},
        {"truck_cost", m.truck_cost},
        {"unit_cost_per_distance", m.unit_cost_per_distance},
        {"demand_min", m.demand_min}, {"demand_max", m.demand_max},
        {"sigma_frac", m.sigma_frac}, {"clamp_lo_frac", m.clamp_lo_frac},
        {"clamp_hi_frac", m.clamp_hi_frac}}},
      {"slap",
       {{"stations", s.stations}, {"slots", s.slots}, {"train_arcs", s.train_arcs},
        {"arcs", s.arcs}, {"hub_stations", s.hub_stations},
        {"max_locomotives", s.max_locomotives},
        {"light_train_capacity", s.light_train_capacity},
        {"train_cost", s.train_cost}, {"wait_cost", s.wait_cost},
        {"light_cost", s.light_cost}, {"light_train_cost", s.light_train_cost},
        {"fleet_cost", s.fleet_cost}, {"bound_spread", s.bound_spread}}}};
  return doc.dump(2) + "\n";
}

FamilyConfig ParseFamilyConfig(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("family config: ") + e.what());
  }
  FamilyConfig cfg;
  std::string family = std::string(ToString(cfg.family));
  Read(doc, "family", family);
  cfg.family = ParseFamily(family);
  Read(doc, "structure_seed", cfg.structure_seed);
  Read(doc, "identity_bits", cfg.identity_bits);
  if (auto it = doc.find("mmcnp"); it != doc.end()) {
    MmcnpParams& m = cfg.mmcnp;
    const json& o = *it;
    Read(o, "vendors", m.vendors);
    Read(o, "fcs", m.fcs);
    Read(o, "lmds", m.lmds);
    Read(o, "truck_types", m.truck_types);
    Read(o, "arcs", m.arcs);
    Read(o, "commodities", m.commodities);
    Read(o, "max_paths", m.max_paths);
    Read(o, "max_paths_per_commodity", m.max_paths_per_commodity);
    Read(o, "max_hops", m.max_hops);
    Read(o, "direct_arcs", m.direct_arcs);
    Read(o, "lateral_arcs", m.lateral_arcs);
    Read(o, "truck_capacity", m.truck_capacity);
    Read(o, "truck_cost", m.truck_cost);
    Read(o, "unit_cost_per_distance", m.unit_cost_per_distance);
    Read(o, "demand_min", m.demand_min);
    Read(o, "demand_max", m.demand_max);
    Read(o, "sigma_frac", m.sigma_frac);
    Read(o, "clamp_lo_frac", m.clamp_lo_frac);
    Read(o, "clamp_hi_frac", m.clamp_hi_frac);
  }
  if (auto it = doc.find("slap"); it != doc.end()) {
    SlapParams& s = cfg.slap;
    const json& o = *it;
    Read(o, "stations", s.stations);
    Read(o, "slots", s.slots);
    Read(o, "train_arcs", s.train_arcs);
    Read(o, "arcs", s.arcs);
    Read(o, "hub_stations", s.hub_stations);
    Read(o, "max_locomotives", s.max_locomotives);
    Read(o, "light_train_capacity", s.light_train_capacity);
    Read(o, "train_cost", s.train_cost);
    Read(o, "wait_cost", s.wait_cost);
    Read(o, "light_cost", s.light_cost);
    Read(o, "light_train_cost", s.light_train_cost);
    Read(o, "fleet_cost", s.fleet_cost);
    Read(o, "bound_spread", s.bound_spread);
  }
  cfg.Validate();
  return cfg;
}

ReferenceNetwork BuildReferenceNetwork(const FamilyConfig& cfg) {
  cfg.Validate();
  return cfg.family == Family::kMmcnpLite ? BuildMmcnp(cfg) : BuildSlap(cfg);
}

PerturbationDraw ReferenceDraw(const FamilyConfig& cfg, const ReferenceNetwork& net) {
  PerturbationDraw draw;
  if (cfg.family == Family::kMmcnpLite) {
    for (const Commodity& c : net.commodities) draw.values.push_back(c.ref_demand);
  } else {
    for (const NetworkArc& arc : net.arcs) {
      if (arc.kind != ArcKind::kTrain) continue;
      draw.values.push_back(arc.ref_lower);
      draw.values.push_back(arc.ref_upper);
    }
  }
  return draw;
}

PerturbationDraw SamplePerturbation(const FamilyConfig& cfg,
                                    const ReferenceNetwork& net,
                                    std::int64_t instance_seed) {
  Rng rng(DeriveSeed(cfg.structure_seed, "instance",
                     static_cast<std::uint64_t>(instance_seed)));
  PerturbationDraw draw;
  draw.instance_seed = instance_seed;
  if (cfg.family == Family::kMmcnpLite) {
    const MmcnpParams& p = cfg.mmcnp;
    for (const Commodity& c : net.commodities) {
      const double ref = c.ref_demand;
      const double v = p.sigma_frac == 0.0 ? ref : rng.Normal(ref, p.sigma_frac * ref);
      draw.values.push_back(
          std::clamp(v, p.clamp_lo_frac * ref, p.clamp_hi_frac * ref));
    }
  } else {
    const SlapParams& p = cfg.slap;
    const double w = p.bound_spread;
    for (const NetworkArc& arc : net.arcs) {
      if (arc.kind != ArcKind::kTrain) continue;
      auto draw_bound = [&](int ref) {
        const double v = std::round(rng.Uniform(ref - w, ref + w));
        return std::clamp(v, 0.0, static_cast<double>(p.max_locomotives));
      };
      double lo = draw_bound(arc.ref_lower);
      double hi = draw_bound(arc.ref_upper);
      if (lo > hi) std::swap(lo, hi);
      draw.values.push_back(lo);
      draw.values.push_back(hi);
    }
  }
  return draw;
}

MipInstance BuildInstance(const FamilyConfig& cfg, const ReferenceNetwork& net,
                          const PerturbationDraw& draw) {
  MipInstance inst = cfg.family == Family::kMmcnpLite
                         ? BuildMmcnpInstance(cfg, net, draw)
                         : BuildSlapInstance(cfg, net, draw);
  inst.family = std::string(ToString(cfg.family));
  inst.param_seed = draw.instance_seed;
  std::ostringstream name;
  name << inst.family << "_s" << cfg.structure_seed << "_i" << draw.instance_seed;
  inst.name = name.str();
  Validate(inst);
  return inst;
}

std::vector<double> ReferenceSolution(const FamilyConfig& cfg,
                                      const ReferenceNetwork& net,
                                      const PerturbationDraw& draw) {
  MipInstance inst = BuildInstance(cfg, net, draw);
  std::vector<double> x = cfg.family == Family::kMmcnpLite
                              ? MmcnpReferenceSolution(net, inst, draw)
                              : SlapReferenceSolution(cfg, net, inst, draw);
  FeasibilityReport rep = CheckFeasibility(inst, x, 1e-6);
  if (!rep.feasible) {
    throw ValidationError("reference construction infeasible for " + inst.name +
                          " (row " + std::to_string(rep.max_row_violation) +
                          ", bound " + std::to_string(rep.max_bound_violation) + ")");
  }
  return x;
}

MipInstance GenerateInstance(const FamilyConfig& cfg, std::int64_t instance_seed) {
  ReferenceNetwork net = BuildReferenceNetwork(cfg);
  PerturbationDraw draw = SamplePerturbation(cfg, net, instance_seed);
  ReferenceSolution(cfg, net, draw);
  return BuildInstance(cfg, net, draw);
}

}  // namespace idpas
