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

// Fixture builders and independent oracles shared by the unit and acceptance
// tests. Nothing here calls into the code under test except to build graphs.

#ifndef INCSCHED_TESTS_TEST_SUPPORT_H_
#define INCSCHED_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "incsched/graph.h"

namespace incsched::testing {

inline std::filesystem::path fixture(const std::string &name) {
  return std::filesystem::path(INCSCHED_FIXTURE_DIR) / name;
}

struct NodeSpec {
  std::string name;
  Bytes param = 0;
  Bytes out = 0;
};

inline ComputeGraph named_graph(const std::vector<NodeSpec> &nodes,
                                const std::vector<std::pair<std::string, std::string>> &edges) {
  std::vector<NodeAttr> attrs;
  auto index = [&](const std::string &n) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].name == n) return static_cast<NodeId>(i);
    }
    return NodeId{-1};
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    attrs.push_back({static_cast<NodeId>(i), nodes[i].name, nodes[i].param, nodes[i].out});
  }
  std::vector<Edge> es;
  for (const auto &[a, b] : edges) es.push_back({index(a), index(b)});
  return ComputeGraph(std::move(attrs), std::move(es));
}

inline ComputeGraph chain(const std::vector<Bytes> &params, const std::vector<Bytes> &outs) {
  std::vector<NodeAttr> attrs;
  std::vector<Edge> es;
  for (std::size_t i = 0; i < params.size(); ++i) {
    attrs.push_back({static_cast<NodeId>(i), std::string(1, static_cast<char>('A' + i)), params[i],
                     i < outs.size() ? outs[i] : 0});
    if (i > 0) es.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(i)});
  }
  return ComputeGraph(std::move(attrs), std::move(es));
}

// A -> B, A -> C, B -> D, C -> D
inline ComputeGraph diamond(const std::vector<Bytes> &params, Bytes out) {
  return named_graph({{"A", params[0], out}, {"B", params[1], out}, {"C", params[2], out}, {"D", params[3], out}},
                     {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}});
}

// Random DAG by independent coin flips over forward pairs (no generator code).
inline ComputeGraph random_graph(std::mt19937_64 &rng, int n, double edge_prob, Bytes max_param, Bytes max_out) {
  std::uniform_int_distribution<Bytes> param(0, max_param);
  std::uniform_int_distribution<Bytes> out(0, max_out);
  std::bernoulli_distribution coin(edge_prob);
  std::vector<NodeAttr> attrs;
  std::vector<Edge> es;
  for (int v = 0; v < n; ++v) attrs.push_back({v, "v" + std::to_string(v), param(rng), out(rng)});
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (coin(rng)) es.push_back({u, v});
    }
  }
  // Shuffle ids so id order is not always topological.
  std::vector<NodeId> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<NodeAttr> shuffled(attrs.size());
  for (int i = 0; i < n; ++i) {
    auto a = attrs[static_cast<std::size_t>(i)];
    a.id = perm[static_cast<std::size_t>(i)];
    shuffled[static_cast<std::size_t>(a.id)] = a;
  }
  for (auto &e : es) e = {perm[static_cast<std::size_t>(e.src)], perm[static_cast<std::size_t>(e.dst)]};
  return ComputeGraph(std::move(shuffled), std::move(es));
}

// Longest path (in edges) ending at each node, by enumerating every path.
inline std::vector<int> oracle_levels(const ComputeGraph &g) {
  const auto n = g.num_nodes();
  std::vector<std::vector<NodeId>> succ(n);
  std::vector<int> indeg(n, 0);
  for (const auto &e : g.edges()) {
    succ[static_cast<std::size_t>(e.src)].push_back(e.dst);
    ++indeg[static_cast<std::size_t>(e.dst)];
  }
  std::vector<int> level(n, 0);
  std::function<void(NodeId, int)> walk = [&](NodeId v, int len) {
    level[static_cast<std::size_t>(v)] = std::max(level[static_cast<std::size_t>(v)], len);
    for (NodeId w : succ[static_cast<std::size_t>(v)]) walk(w, len + 1);
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) walk(static_cast<NodeId>(v), 0);
  }
  return level;
}

struct OracleMetrics {
  std::vector<Bytes> mem;
  std::vector<Bytes> comm;
  Bytes peak = 0;
  Bytes offcache = 0;
  Bytes max_comm = 0;
  ObjectiveVector vec() const { return {peak, offcache, max_comm}; }
};

// Second metric implementation: walks nodes and edges back to front.
inline OracleMetrics oracle_metrics(const ComputeGraph &g, const std::vector<Stage> &s, int K, Bytes cache) {
  OracleMetrics m;
  m.mem.assign(static_cast<std::size_t>(K), 0);
  m.comm.assign(static_cast<std::size_t>(std::max(K - 1, 0)), 0);
  for (std::size_t i = g.num_nodes(); i-- > 0;) m.mem[static_cast<std::size_t>(s[i])] += g.nodes()[i].param_bytes;
  for (std::size_t i = g.num_edges(); i-- > 0;) {
    const auto &e = g.edges()[i];
    const auto a = s[static_cast<std::size_t>(e.src)];
    const auto b = s[static_cast<std::size_t>(e.dst)];
    // Charged once, at the producer's boundary.
    if (a < b) m.comm[static_cast<std::size_t>(a)] += g.nodes()[static_cast<std::size_t>(e.src)].out_bytes;
  }
  for (Bytes x : m.mem) {
    m.peak = std::max(m.peak, x);
    m.offcache += x > cache ? x - cache : 0;
  }
  for (Bytes c : m.comm) m.max_comm = std::max(m.max_comm, c);
  return m;
}

inline bool oracle_valid(const ComputeGraph &g, const std::vector<Stage> &s, int K, bool nonempty) {
  for (const auto &e : g.edges()) {
    if (s[static_cast<std::size_t>(e.src)] > s[static_cast<std::size_t>(e.dst)]) return false;
  }
  if (nonempty) {
    for (Stage k = 0; k < K; ++k) {
      if (std::find(s.begin(), s.end(), k) == s.end()) return false;
    }
  }
  return true;
}

inline std::tuple<Bytes, Bytes, Bytes> oracle_key(const ObjectiveVector &v, bool comm_second) {
  return comm_second ? std::make_tuple(v.peak_mem, v.max_comm, v.total_offcache)
                     : std::make_tuple(v.peak_mem, v.total_offcache, v.max_comm);
}

// Exhaustive optimum over full domains via a plain counter (independent of brute_force).
inline ObjectiveVector oracle_optimum(const ComputeGraph &g, int K, Bytes cache, bool nonempty = true,
                                      bool comm_second = false) {
  const auto n = g.num_nodes();
  std::vector<Stage> s(n, 0);
  bool found = false;
  ObjectiveVector best;
  while (true) {
    if (oracle_valid(g, s, K, nonempty)) {
      const auto v = oracle_metrics(g, s, K, cache).vec();
      if (!found || oracle_key(v, comm_second) < oracle_key(best, comm_second)) best = v;
      found = true;
    }
    std::size_t i = 0;
    while (i < n && ++s[i] == K) s[i++] = 0;
    if (i == n) break;
  }
  return best;
}

// Drops one named column from CSV text with no quoted commas.
inline std::string csv_without_column(const std::string &text, const std::string &column) {
  auto split = [](const std::string &line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    return cells;
  };
  std::string out;
  std::size_t drop = std::string::npos;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto cells = split(text.substr(pos, end - pos));
    if (drop == std::string::npos) {
      drop = static_cast<std::size_t>(std::find(cells.begin(), cells.end(), column) - cells.begin());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == drop) continue;
      out += cells[i];
      out += i + 1 < cells.size() ? "," : "";
    }
    out += "\n";
    pos = end + 1;
  }
  return out;
}

inline std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace incsched::testing

#endif  // INCSCHED_TESTS_TEST_SUPPORT_H_
