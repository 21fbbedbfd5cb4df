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

#include "incsched/graph.h"

#include <algorithm>
#include <queue>
#include <set>

#include "incsched/error.h"

namespace incsched {
namespace {
constexpr const char *kModule = "graph-core";

void build_csr(std::size_t n, const std::vector<Edge> &edges, bool by_dst, std::vector<std::size_t> *offsets,
               std::vector<NodeId> *ids) {
  offsets->assign(n + 1, 0);
  for (const auto &e : edges) {
    ++(*offsets)[static_cast<std::size_t>(by_dst ? e.dst : e.src) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    (*offsets)[i + 1] += (*offsets)[i];
  }
  ids->assign(edges.size(), 0);
  std::vector<std::size_t> fill(offsets->begin(), offsets->end() - 1);
  for (const auto &e : edges) {
    auto key = static_cast<std::size_t>(by_dst ? e.dst : e.src);
    (*ids)[fill[key]++] = by_dst ? e.src : e.dst;
  }
}
}  // namespace

ComputeGraph::ComputeGraph(std::vector<NodeAttr> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const auto n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &node = nodes_[i];
    if (node.id != static_cast<NodeId>(i)) {
      throw Error(kModule, "node ids must be dense, expected " + std::to_string(i) + " got " + std::to_string(node.id));
    }
    if (node.param_bytes < 0 || node.out_bytes < 0) {
      throw Error(kModule, "negative attribute on node " + std::to_string(i));
    }
    total_param_ += node.param_bytes;
  }
  std::set<Edge> seen;
  for (const auto &e : edges_) {
    if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= n || static_cast<std::size_t>(e.dst) >= n) {
      throw Error(kModule, "dangling edge endpoint (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ")");
    }
    if (!seen.insert(e).second) {
      throw Error(kModule, "duplicate edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ")");
    }
  }
  build_csr(n, edges_, true, &pred_offsets_, &pred_ids_);
  build_csr(n, edges_, false, &succ_offsets_, &succ_ids_);

  std::vector<std::size_t> indeg(n);
  for (std::size_t v = 0; v < n; ++v) {
    indeg[v] = pred_offsets_[v + 1] - pred_offsets_[v];
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push(static_cast<NodeId>(v));
  }
  topo_.reserve(n);
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (NodeId w : succs(v)) {
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  if (topo_.size() != n) {
    throw Error(kModule, "cycle detected");
  }
}

std::span<const NodeId> ComputeGraph::preds(NodeId v) const {
  auto i = static_cast<std::size_t>(v);
  return {pred_ids_.data() + pred_offsets_[i], pred_offsets_[i + 1] - pred_offsets_[i]};
}

std::span<const NodeId> ComputeGraph::succs(NodeId v) const {
  auto i = static_cast<std::size_t>(v);
  return {succ_ids_.data() + succ_offsets_[i], succ_offsets_[i + 1] - succ_offsets_[i]};
}

std::vector<int> asap_levels(const ComputeGraph &g) {
  std::vector<int> level(g.num_nodes(), 0);
  for (NodeId v : g.topo_order()) {
    for (NodeId u : g.preds(v)) {
      level[v] = std::max(level[v], level[u] + 1);
    }
  }
  return level;
}

int graph_depth(const std::vector<int> &levels) {
  return levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
}

std::vector<NodeId> asap_order(const ComputeGraph &g, const std::vector<int> &levels) {
  std::vector<NodeId> order(g.num_nodes());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<NodeId>(i);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return levels[a] < levels[b]; });
  return order;
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [kind](const Violation &v) { return v.kind == kind; });
}

ValidationReport validate_schedule(const ComputeGraph &g, const Schedule &s, const SchedulePolicy &policy) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, NodeId src, NodeId dst, Stage stage, std::string msg) {
    report.violations.push_back({kind, src, dst, stage, std::move(msg)});
  };
  if (s.num_stages < 1) {
    add(ViolationKind::kStageOutOfRange, -1, -1, s.num_stages, "num_stages must be >= 1");
    return report;
  }
  if (s.stage.size() != g.num_nodes()) {
    add(ViolationKind::kSizeMismatch, -1, -1, kUnassigned,
        "assignment covers " + std::to_string(s.stage.size()) + " nodes, graph has " + std::to_string(g.num_nodes()));
    return report;
  }
  std::vector<bool> usable(g.num_nodes(), true);
  std::vector<int> used(static_cast<std::size_t>(s.num_stages), 0);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    Stage st = s.stage[v];
    const auto &name = g.node(static_cast<NodeId>(v)).name;
    if (st == kUnassigned) {
      add(ViolationKind::kUnassigned, static_cast<NodeId>(v), -1, st, "node " + name + " unassigned");
      usable[v] = false;
    } else if (st < 0 || st >= s.num_stages) {
      add(ViolationKind::kStageOutOfRange, static_cast<NodeId>(v), -1, st,
          "node " + name + " stage " + std::to_string(st) + " out of range");
      usable[v] = false;
    } else {
      ++used[static_cast<std::size_t>(st)];
    }
  }
  for (const auto &e : g.edges()) {
    if (usable[e.src] && usable[e.dst] && s.stage[e.src] > s.stage[e.dst]) {
      add(ViolationKind::kDependence, e.src, e.dst, s.stage[e.src],
          "dependence violated on edge (" + g.node(e.src).name + "," + g.node(e.dst).name + ")");
    }
  }
  if (policy.require_nonempty_stages) {
    for (int k = 0; k < s.num_stages; ++k) {
      if (used[static_cast<std::size_t>(k)] == 0) {
        add(ViolationKind::kEmptyStage, -1, -1, k, "stage " + std::to_string(k) + " empty");
      }
    }
  }
  return report;
}

std::array<Bytes, 3> ranked(const ObjectiveVector &v, ObjectiveOrder order) {
  if (order == ObjectiveOrder::kPeakCommOffcache) return {v.peak_mem, v.max_comm, v.total_offcache};
  return {v.peak_mem, v.total_offcache, v.max_comm};
}

bool lex_less(const ObjectiveVector &a, const ObjectiveVector &b, ObjectiveOrder order) {
  return ranked(a, order) < ranked(b, order);
}

ScheduleMetrics schedule_metrics(const ComputeGraph &g, const Schedule &s, Bytes cache_capacity) {
  auto report = validate_schedule(g, s, SchedulePolicy{false});
  if (!report.ok()) {
    throw Error(kModule, "invalid schedule: " + report.violations.front().message);
  }
  const auto K = static_cast<std::size_t>(s.num_stages);
  ScheduleMetrics m;
  m.per_stage_mem.assign(K, 0);
  m.per_stage_offcache.assign(K, 0);
  m.per_boundary_comm.assign(K - 1, 0);
  for (const auto &node : g.nodes()) {
    m.per_stage_mem[static_cast<std::size_t>(s.stage[node.id])] += node.param_bytes;
  }
  for (std::size_t k = 0; k < K; ++k) {
    m.peak_mem = std::max(m.peak_mem, m.per_stage_mem[k]);
    m.per_stage_offcache[k] = std::max<Bytes>(0, m.per_stage_mem[k] - cache_capacity);
    m.total_offcache += m.per_stage_offcache[k];
  }
  for (const auto &e : g.edges()) {
    Stage si = s.stage[e.src];
    if (si < s.stage[e.dst]) {
      m.per_boundary_comm[static_cast<std::size_t>(si)] += g.tensor_bytes(e);
    }
  }
  for (Bytes c : m.per_boundary_comm) m.max_comm = std::max(m.max_comm, c);
  return m;
}

}  // namespace incsched
