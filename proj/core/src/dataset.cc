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

#include "idpas/dataset.h"

#include <cstdio>
#include <cstring>
#include <iostream>
#include <set>

#include "idpas/errors.h"
#include "idpas/parallel.h"
#include "json.hpp"

namespace idpas {
namespace {

using nlohmann::json;

constexpr char kSampleMagic[4] = {'I', 'D', 'P', 'S'};
constexpr std::uint32_t kSampleVersion = 1;

template <typename T>
void PutLe(std::string& out, T value) {
  std::uint64_t bits = 0;
  static_assert(sizeof(T) <= sizeof(bits));
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw ParseError(std::string("sample file truncated while reading ") + what);
    }
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b]))
              << (8 * b);
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
  }
  std::string_view Take(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      throw ParseError(std::string("sample file truncated while reading ") + what);
    }
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string HashHex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t ParseHashHex(const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t h = std::stoull(text, &used, 16);
    if (used != text.size()) throw ParseError("bad hash '" + text + "'");
    return h;
  } catch (const std::logic_error&) {
    throw ParseError("bad hash '" + text + "'");
  }
}

}  // namespace

std::string_view ToString(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "validation") return Split::kValidation;
  if (text == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(text) + "'");
}

std::vector<std::uint8_t> ZeroCandidates(const MipInstance& inst) {
  std::vector<std::uint8_t> out;
  for (int j : IntegerIndices(inst)) {
    out.push_back(inst.lower[j] <= 0.0 && inst.upper[j] >= 0.0 ? 1 : 0);
  }
  return out;
}

TrainingSample MakeSample(const MipInstance& inst, std::string instance_ref,
                          int u_p, const std::vector<Solution>& pool,
                          double label_tol) {
  TrainingSample sample;
  sample.instance_ref = std::move(instance_ref);
  sample.instance_hash = InstanceHash(inst);
  sample.num_integer = static_cast<int>(IntegerIndices(inst).size());
  sample.u_p = u_p;
  std::set<std::vector<std::uint8_t>> seen;
  for (const Solution& s : pool) {
    std::vector<std::uint8_t> labels = BinarizeSolution(inst, s.values, label_tol);
    if (!seen.insert(labels).second) continue;
    sample.labels.push_back(std::move(labels));
    sample.objectives.push_back(s.objective);
  }
  return sample;
}

std::string EncodeSample(const TrainingSample& sample) {
  std::string out(kSampleMagic, sizeof(kSampleMagic));
  PutLe<std::uint32_t>(out, kSampleVersion);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(sample.num_integer));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(sample.u_p));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(sample.labels.size()));
  PutLe<std::uint64_t>(out, sample.instance_hash);
  const std::size_t row_bytes = (static_cast<std::size_t>(sample.num_integer) + 7) / 8;
  for (const auto& row : sample.labels) {
    if (static_cast<int>(row.size()) != sample.num_integer) {
      throw DimensionError("label vector has length " + std::to_string(row.size()) +
                           ", expected " + std::to_string(sample.num_integer));
    }
    std::string packed(row_bytes, '\0');
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1u << (i % 8)));
    }
    out += packed;
  }
  for (double obj : sample.objectives) PutLe<double>(out, obj);
  return out;
}

TrainingSample DecodeSample(std::string_view bytes, std::string instance_ref) {
  Reader in(bytes);
  if (in.Take(4, "magic") != std::string_view(kSampleMagic, 4)) {
    throw ParseError("not a label file (bad magic)");
  }
  const auto version = in.Get<std::uint32_t>("version");
  if (version != kSampleVersion) {
    throw ParseError("unsupported label file version " + std::to_string(version));
  }
  TrainingSample sample;
  sample.instance_ref = std::move(instance_ref);
  sample.num_integer = static_cast<int>(in.Get<std::uint32_t>("|I|"));
  sample.u_p = static_cast<int>(in.Get<std::uint32_t>("u_p"));
  const auto count = in.Get<std::uint32_t>("count");
  sample.instance_hash = in.Get<std::uint64_t>("instance hash");
  const std::size_t row_bytes = (static_cast<std::size_t>(sample.num_integer) + 7) / 8;
  for (std::uint32_t r = 0; r < count; ++r) {
    std::string_view packed = in.Take(row_bytes, "label rows");
    std::vector<std::uint8_t> row(sample.num_integer);
    for (int i = 0; i < sample.num_integer; ++i) {
      row[i] = (static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1u;
    }
    sample.labels.push_back(std::move(row));
  }
  for (std::uint32_t r = 0; r < count; ++r) {
    sample.objectives.push_back(in.Get<double>("objectives"));
  }
  if (!in.done()) throw ParseError("label file has trailing bytes");
  return sample;
}

std::string EncodeSolutions(std::uint64_t instance_hash,
                            const std::vector<Solution>& solutions) {
  std::string out = "{\"instance_hash\": \"" + HashHex(instance_hash) + "\",\n \"solutions\": [";
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    json entry = {{"objective", solutions[k].objective},
                  {"source", solutions[k].source},
                  {"values", solutions[k].values}};
    out += (k == 0 ? "\n  " : ",\n  ") + entry.dump();
  }
  out += "\n]}\n";
  return out;
}

std::vector<Solution> DecodeSolutions(std::string_view text,
                                      std::uint64_t expected_hash) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("solution file: ") + e.what());
  }
  try {
    const std::uint64_t hash = ParseHashHex(doc.at("instance_hash").get<std::string>());
    if (hash != expected_hash) {
      throw ValidationError("solution file belongs to instance hash " + HashHex(hash) +
                            ", expected " + HashHex(expected_hash));
    }
    std::vector<Solution> out;
    for (const json& entry : doc.at("solutions")) {
      Solution s;
      s.objective = entry.at("objective").get<double>();
      s.source = entry.at("source").get<std::string>();
      s.values = entry.at("values").get<std::vector<double>>();
      s.feasible = true;
      out.push_back(std::move(s));
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("solution file: ") + e.what());
  }
}

void VerifySample(const MipInstance& inst, const TrainingSample& sample,
                  const std::vector<Solution>& solutions, double tol) {
  if (sample.instance_hash != InstanceHash(inst)) {
    throw ValidationError("sample " + sample.instance_ref + " does not match instance " +
                          inst.name + " (hash mismatch)");
  }
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    if (!CheckFeasibility(inst, solutions[k].values, tol).feasible) {
      throw ValidationError("stored solution " + std::to_string(k) + " of " + inst.name +
                            " is infeasible at tolerance " + std::to_string(tol));
    }
  }
  const TrainingSample expected =
      MakeSample(inst, sample.instance_ref, sample.u_p, solutions, tol);
  if (expected.labels != sample.labels || expected.objectives != sample.objectives) {
    throw ValidationError("labels of " + inst.name +
                          " are not the binarized stored solutions");
  }
}

CollectResult CollectDataset(const std::vector<NamedInstance>& instances,
                             const CollectOptions& options) {
  if (instances.empty()) throw ConfigError("collect: empty instance list");
  if (options.u_p < 1) throw ConfigError("collect: u_p must be at least 1");
  std::vector<CollectedInstance> slots(instances.size());
  ParallelFor(static_cast<int>(instances.size()), options.jobs, [&](int k) {
    const NamedInstance& item = instances[k];
    CollectedInstance& out = slots[k];
    out.instance_ref = item.ref;
    out.solutions =
        CollectSolutionPool(item.instance, options.u_p, options.solver, &out.status);
    out.sample = MakeSample(item.instance, item.ref, options.u_p, out.solutions,
                            options.label_tol);
  });
  CollectResult result;
  for (CollectedInstance& c : slots) {
    if (c.solutions.empty()) {
      std::cerr << "warning: no feasible solution for " << c.instance_ref
                << "; excluded from the dataset\n";
      result.excluded.push_back(c.instance_ref);
    } else {
      result.kept.push_back(std::move(c));
    }
  }
  return result;
}

LabelStatistics ComputeLabelStatistics(const std::vector<TrainingSample>& samples) {
  if (samples.empty()) throw ConfigError("label statistics: no samples");
  LabelStatistics stats;
  const int n = samples.front().num_integer;
  std::vector<std::int64_t> zeros(n, 0);
  std::int64_t total_zeros = 0;
  for (const TrainingSample& s : samples) {
    if (s.num_integer != n) {
      throw ConfigError("label statistics: samples disagree on |I| (" +
                        std::to_string(n) + " vs " + std::to_string(s.num_integer) + ")");
    }
    for (const auto& row : s.labels) {
      for (int i = 0; i < n; ++i) {
        if (row[i] == 0) {
          ++zeros[i];
          ++total_zeros;
        }
      }
      ++stats.label_vectors;
    }
  }
  stats.zero_frequency.resize(n, 0.0);
  if (stats.label_vectors > 0) {
    for (int i = 0; i < n; ++i) {
      stats.zero_frequency[i] = static_cast<double>(zeros[i]) / stats.label_vectors;
    }
    if (n > 0) {
      stats.zero_fraction =
          static_cast<double>(total_zeros) / (static_cast<double>(stats.label_vectors) * n);
    }
  }
  return stats;
}

std::string SerializeManifest(const DatasetManifest& m) {
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"instance", e.instance},
                       {"sample", e.sample},
                       {"solutions", e.solutions},
                       {"instance_hash", HashHex(e.instance_hash)},
                       {"num_labels", e.num_labels}});
  }
  json doc = {{"family", m.family},
              {"split", std::string(ToString(m.split))},
              {"u_p", m.u_p},
              {"time_limit", m.time_limit},
              {"node_limit", m.node_limit},
              {"seed", m.seed},
              {"entries", entries},
              {"excluded", m.excluded}};
  return doc.dump(2) + "\n";
}

DatasetManifest ParseManifest(std::string_view text) {
  try {
    json doc = json::parse(text.begin(), text.end());
    DatasetManifest m;
    m.family = doc.at("family").get<std::string>();
    m.split = ParseSplit(doc.at("split").get<std::string>());
    m.u_p = doc.at("u_p").get<int>();
    m.time_limit = doc.at("time_limit").get<double>();
    m.node_limit = doc.at("node_limit").get<std::int64_t>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    for (const json& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.instance = e.at("instance").get<std::string>();
      entry.sample = e.at("sample").get<std::string>();
      entry.solutions = e.at("solutions").get<std::string>();
      entry.instance_hash = ParseHashHex(e.at("instance_hash").get<std::string>());
      entry.num_labels = e.at("num_labels").get<int>();
      m.entries.push_back(std::move(entry));
    }
    m.excluded = doc.at("excluded").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset manifest: ") + e.what());
  }
}

DatasetManifest WriteDataset(const std::filesystem::path& manifest_path,
                             const std::string& family, Split split,
                             const CollectResult& result,
                             const CollectOptions& options) {
  namespace fs = std::filesystem;
  const fs::path dir = manifest_path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  DatasetManifest m;
  m.family = family;
  m.split = split;
  m.u_p = options.u_p;
  m.time_limit = options.solver.time_limit;
  m.node_limit = options.solver.node_limit;
  m.seed = options.solver.rng_seed;
  m.excluded = result.excluded;
  const std::string prefix = manifest_path.stem().string();
  for (std::size_t k = 0; k < result.kept.size(); ++k) {
    const CollectedInstance& c = result.kept[k];
    char index[16];
    std::snprintf(index, sizeof(index), "%04zu", k);
    const std::string stem =
        prefix + "_" + index + "_" + fs::path(c.instance_ref).stem().string();
    ManifestEntry entry;
    entry.instance = c.instance_ref;
    entry.sample = stem + ".labels";
    entry.solutions = stem + ".sol.json";
    entry.instance_hash = c.sample.instance_hash;
    entry.num_labels = static_cast<int>(c.sample.labels.size());
    WriteFileAtomic(dir / entry.sample, EncodeSample(c.sample));
    WriteFileAtomic(dir / entry.solutions,
                    EncodeSolutions(c.sample.instance_hash, c.solutions));
    m.entries.push_back(std::move(entry));
  }
  WriteFileAtomic(manifest_path, SerializeManifest(m));
  return m;
}

std::vector<LoadedSample> LoadDataset(const std::filesystem::path& manifest_path) {
  const DatasetManifest m = ParseManifest(ReadFile(manifest_path));
  const std::filesystem::path dir = manifest_path.parent_path();
  std::vector<LoadedSample> out;
  for (const ManifestEntry& e : m.entries) {
    LoadedSample item;
    item.instance = LoadInstance(dir / e.instance);
    if (InstanceHash(item.instance) != e.instance_hash) {
      throw ValidationError("instance " + e.instance +
                            " changed since its labels were collected");
    }
    item.sample = DecodeSample(ReadFile(dir / e.sample), e.instance);
    if (item.sample.instance_hash != e.instance_hash) {
      throw ValidationError("label file " + e.sample + " belongs to another instance");
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace idpas
