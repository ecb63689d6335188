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

#include "idpas/run_config.h"

#include <set>

#include "idpas/errors.h"
#include "idpas/mip.h"
#include "json.hpp"

namespace idpas {
namespace {

using nlohmann::ordered_json;

template <typename T>
void Read(const ordered_json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

void RunConfig::Validate() const {
  family.Validate();
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(train > 0 && validation > 0 && test > 0, "split sizes must be positive");
  require(u_p > 0, "u_p must be positive");
  require(collect_time > 0 && tune_time > 0 && test_time > 0, "time budgets must be positive");
  require(collect_nodes > 0, "collect_nodes must be positive");
  require(hidden > 0 && heads > 0 && hidden % heads == 0, "hidden must be a multiple of heads");
  require(batch_size > 0 && max_steps > 0 && lr > 0, "training settings must be positive");
  require(!deltas.empty() && !k0_percents.empty(), "grid sets must be non-empty");
  for (int d : deltas) require(d >= 0, "deltas must be non-negative");
  for (int p : k0_percents) require(p > 0 && p <= 100, "k0 percentages must be in (0, 100]");
  require(!approaches.empty(), "approaches must be non-empty");
  std::set<std::string> seen;
  for (const std::string& a : approaches) {
    require(a == "plain" || a == "pas" || a == "id-pas", "unknown approach '" + a + "'");
    require(seen.insert(a).second, "duplicate approach '" + a + "'");
  }
  require(pas_variant == "id-pas" || pas_variant == "binary-pas",
          "pas_variant must be id-pas or binary-pas");
  require(pas_k1_percent >= 0 && pas_k1_percent < 100, "pas_k1_percent must be in [0, 100)");
  require(!out.empty(), "out must be set");
}

RunConfig ParseRunConfig(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "family",    "train",          "validation",    "test",     "u_p",
      "collect_time", "collect_nodes", "tune_time",   "test_time", "reference_time",
      "hidden",    "heads",          "batch_size",    "max_steps", "lr",
      "deltas",    "k0_percents",    "approaches",    "pas_variant", "pas_k1_percent",
      "out",       "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("config: unknown field '" + key + "'");
  }
  RunConfig cfg;
  if (j.contains("family")) {
    try {
      cfg.family = ParseFamilyConfig(j["family"].dump());
    } catch (const ParseError& e) {
      throw ConfigError(std::string("config field 'family': ") + e.what());
    }
  }
  Read(j, "train", cfg.train);
  Read(j, "validation", cfg.validation);
  Read(j, "test", cfg.test);
  Read(j, "u_p", cfg.u_p);
  Read(j, "collect_time", cfg.collect_time);
  Read(j, "collect_nodes", cfg.collect_nodes);
  Read(j, "tune_time", cfg.tune_time);
  Read(j, "test_time", cfg.test_time);
  Read(j, "reference_time", cfg.reference_time);
  Read(j, "hidden", cfg.hidden);
  Read(j, "heads", cfg.heads);
  Read(j, "batch_size", cfg.batch_size);
  Read(j, "max_steps", cfg.max_steps);
  Read(j, "lr", cfg.lr);
  Read(j, "deltas", cfg.deltas);
  Read(j, "k0_percents", cfg.k0_percents);
  Read(j, "approaches", cfg.approaches);
  Read(j, "pas_variant", cfg.pas_variant);
  Read(j, "pas_k1_percent", cfg.pas_k1_percent);
  Read(j, "out", cfg.out);
  Read(j, "seed", cfg.seed);
  cfg.Validate();
  return cfg;
}

std::string SerializeRunConfig(const RunConfig& cfg) {
  ordered_json j;
  j["family"] = ordered_json::parse(SerializeFamilyConfig(cfg.family));
  j["train"] = cfg.train;
  j["validation"] = cfg.validation;
  j["test"] = cfg.test;
  j["u_p"] = cfg.u_p;
  j["collect_time"] = cfg.collect_time;
  j["collect_nodes"] = cfg.collect_nodes;
  j["tune_time"] = cfg.tune_time;
  j["test_time"] = cfg.test_time;
  j["reference_time"] = cfg.reference_time;
  j["hidden"] = cfg.hidden;
  j["heads"] = cfg.heads;
  j["batch_size"] = cfg.batch_size;
  j["max_steps"] = cfg.max_steps;
  j["lr"] = cfg.lr;
  j["deltas"] = cfg.deltas;
  j["k0_percents"] = cfg.k0_percents;
  j["approaches"] = cfg.approaches;
  j["pas_variant"] = cfg.pas_variant;
  j["pas_k1_percent"] = cfg.pas_k1_percent;
  j["out"] = cfg.out;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  return ParseRunConfig(ReadFile(path));
}

}  // namespace idpas
