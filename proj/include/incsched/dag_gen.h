/**
 * Copyright 2026 The incsched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INCSCHED_DAG_GEN_H_
#define INCSCHED_DAG_GEN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "incsched/graph.h"

namespace incsched {

struct ByteRange {
  Bytes lo = 0;
  Bytes hi = 0;
};

struct GenSpec {
  int num_nodes = 30;
  int max_in_degree = 2;
  ByteRange param_bytes{Bytes{1} << 10, Bytes{4} << 20};
  ByteRange out_bytes{Bytes{1} << 10, Bytes{1} << 20};
  std::uint64_t seed = 0;
  // Adds a zero-parameter "start" source and "end" sink; both count toward num_nodes.
  bool virtual_endpoints = true;
};

// Nodes are ranked 0..n-1 and every non-source node draws its in-degree
// uniformly from [1, max_in_degree], wiring to distinct earlier ranks with a
// recency bias. Output is a pure function of the spec.
ComputeGraph generate_dag(const GenSpec &spec);

// splitmix64 step; used to derive per-graph seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct CorpusEntry {
  std::string path;  // relative to the corpus directory
  GenSpec spec;
  ComputeGraph graph;
  int depth = 0;
};

// count graphs for each degree; per-graph seeds derive from master_seed.
std::vector<CorpusEntry> generate_corpus(const GenSpec &tmpl, const std::vector<int> &degrees, int count,
                                         std::uint64_t master_seed);
// Writes graph files plus manifest.json under dir.
void write_corpus(const std::filesystem::path &dir, const std::vector<CorpusEntry> &corpus);
std::string manifest_json(const std::vector<CorpusEntry> &corpus);

struct ManifestEntry {
  std::string path;
  std::uint64_t seed = 0;
  int num_nodes = 0;
  int max_in_degree = 0;
  int depth = 0;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path &manifest_path);

}  // namespace incsched

#endif  // INCSCHED_DAG_GEN_H_
