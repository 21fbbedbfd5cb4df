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

#include "incsched/dag_gen.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "incsched/error.h"
#include "incsched/io.h"
#include "json.hpp"

namespace incsched {
namespace {
constexpr const char *kModule = "dag-gen";
// Percent chance that node j wires to rank j-1. Skipping it is what opens
// parallel branches; DNN graphs are long chains with short side paths.
constexpr std::uint64_t kChainPercent = 90;

// Bounded draws on top of mt19937_64 so output does not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

void check_spec(const GenSpec &spec) {
  if (spec.num_nodes < 1) throw Error(kModule, "num_nodes must be >= 1");
  if (spec.max_in_degree < 1) throw Error(kModule, "max_in_degree must be >= 1");
  for (const auto &r : {spec.param_bytes, spec.out_bytes}) {
    if (r.lo < 0 || r.hi < r.lo) throw Error(kModule, "attribute ranges need 0 <= lo <= hi");
  }
  if (spec.virtual_endpoints && spec.num_nodes < 2) {
    throw Error(kModule, "virtual start/end nodes need num_nodes >= 2");
  }
}

// Recency-biased pick among ranks [0, j): rank j-1-g with g geometric(1/2).
NodeId recent_rank(Rng &rng, NodeId j) {
  NodeId g = 0;
  while (g < j - 1 && rng.coin()) ++g;
  return j - 1 - g;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ComputeGraph generate_dag(const GenSpec &spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  const NodeId n = spec.num_nodes;
  const NodeId deg = spec.max_in_degree;
  const bool ends = spec.virtual_endpoints;
  const NodeId last_wired = ends ? n - 2 : n - 1;

  std::vector<NodeAttr> nodes(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    auto &node = nodes[v];
    node.id = v;
    node.param_bytes = rng.between(spec.param_bytes.lo, spec.param_bytes.hi);
    node.out_bytes = rng.between(spec.out_bytes.lo, spec.out_bytes.hi);
    node.name = "op_" + std::to_string(v);
  }
  if (ends) {
    nodes.front().name = "start";
    nodes.front().param_bytes = 0;
    nodes.back().name = "end";
    nodes.back().param_bytes = 0;
    nodes.back().out_bytes = 0;
  }

  std::vector<Edge> edges;
  // Nodes without a consumer yet. With virtual endpoints the sink absorbs them,
  // so their count is kept at or below the in-degree bound.
  std::vector<NodeId> open;
  if (n > 0) open.push_back(0);
  std::vector<NodeId> preds;
  for (NodeId j = 1; j <= last_wired; ++j) {
    const NodeId d = static_cast<NodeId>(rng.between(1, std::min(deg, j)));
    preds.clear();
    if (rng.below(100) < kChainPercent) preds.push_back(j - 1);
    int tries = 0;
    while (static_cast<NodeId>(preds.size()) < d) {
      NodeId cand = tries < 64 ? recent_rank(rng, j) : static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(j)));
      ++tries;
      if (std::find(preds.begin(), preds.end(), cand) == preds.end()) preds.push_back(cand);
    }
    if (ends && static_cast<NodeId>(open.size()) >= deg) {
      bool drains = std::any_of(preds.begin(), preds.end(),
                                [&](NodeId p) { return std::find(open.begin(), open.end(), p) != open.end(); });
      // Draining the newest open node (j-1) keeps the long chain intact.
      if (!drains) preds.back() = open.back();
    }
    std::sort(preds.begin(), preds.end());
    for (NodeId p : preds) {
      edges.push_back({p, j});
      open.erase(std::remove(open.begin(), open.end(), p), open.end());
    }
    open.push_back(j);
  }
  if (ends && n >= 2) {
    for (NodeId p : open) edges.push_back({p, n - 1});
  }
  return ComputeGraph(std::move(nodes), std::move(edges));
}

std::vector<CorpusEntry> generate_corpus(const GenSpec &tmpl, const std::vector<int> &degrees, int count,
                                         std::uint64_t master_seed) {
  if (count < 1) throw Error(kModule, "corpus count must be >= 1");
  if (degrees.empty()) throw Error(kModule, "corpus needs at least one degree");
  std::vector<CorpusEntry> corpus;
  std::uint64_t index = 0;
  for (int d : degrees) {
    for (int i = 0; i < count; ++i, ++index) {
      CorpusEntry entry;
      entry.spec = tmpl;
      entry.spec.max_in_degree = d;
      entry.spec.seed = derive_seed(master_seed, index);
      entry.graph = generate_dag(entry.spec);
      entry.depth = graph_depth(asap_levels(entry.graph));
      char name[64];
      std::snprintf(name, sizeof(name), "graphs/g%04llu_deg%d.json", static_cast<unsigned long long>(index), d);
      entry.path = name;
      corpus.push_back(std::move(entry));
    }
  }
  return corpus;
}

std::string manifest_json(const std::vector<CorpusEntry> &corpus) {
  std::ostringstream os;
  os << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"graphs\": [";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto &e = corpus[i];
    os << (i ? ",\n    " : "\n    ") << "{\"path\": " << nlohmann::json(e.path).dump() << ", \"seed\": " << e.spec.seed
       << ", \"num_nodes\": " << e.graph.num_nodes() << ", \"max_in_degree\": " << e.spec.max_in_degree
       << ", \"depth\": " << e.depth << "}";
  }
  os << (corpus.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

void write_corpus(const std::filesystem::path &dir, const std::vector<CorpusEntry> &corpus) {
  for (const auto &e : corpus) write_graph_file(dir / e.path, e.graph);
  write_text_file(dir / "manifest.json", manifest_json(corpus));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path &manifest_path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::exception &e) {
    throw Error(kModule, std::string("malformed manifest: ") + e.what());
  }
  std::vector<ManifestEntry> out;
  if (!doc.contains("graphs") || !doc["graphs"].is_array()) throw Error(kModule, "malformed manifest: no graphs array");
  for (const auto &g : doc["graphs"]) {
    ManifestEntry e;
    e.path = g.value("path", std::string());
    e.seed = g.value("seed", std::uint64_t{0});
    e.num_nodes = g.value("num_nodes", 0);
    e.max_in_degree = g.value("max_in_degree", 0);
    e.depth = g.value("depth", 0);
    if (e.path.empty()) throw Error(kModule, "malformed manifest: entry without path");
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace incsched
