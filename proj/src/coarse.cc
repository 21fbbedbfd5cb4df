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

#include "incsched/coarse.h"

#include <algorithm>
#include <cstdlib>

#include "incsched/error.h"
#include "incsched/io.h"

namespace incsched {
namespace {
constexpr const char *kModule = "coarse-sched";

void check_stage_count(const ComputeGraph &g, int num_stages) {
  if (num_stages < 1) throw Error(kModule, "num_stages must be >= 1");
  if (static_cast<std::size_t>(num_stages) > g.num_nodes()) {
    throw Error(kModule, "K=" + std::to_string(num_stages) + " exceeds |V|=" + std::to_string(g.num_nodes()) +
                             ", non-empty stages impossible");
  }
}
}  // namespace

CoarseSource CoarseSource::parse(const std::string &text) {
  if (text == "balanced") return {CoarseKind::kHeuristicBalanced, "balanced_topo_partition"};
  if (text == "list") return {CoarseKind::kListSchedule, "list_schedule"};
  if (text.rfind("file:", 0) == 0 && text.size() > 5) return {CoarseKind::kExternalFile, text.substr(5)};
  throw Error(kModule, "unknown coarse source '" + text + "' (balanced|list|file:PATH)");
}

std::string CoarseSource::to_string() const {
  switch (kind) {
    case CoarseKind::kHeuristicBalanced:
      return "balanced";
    case CoarseKind::kListSchedule:
      return "list";
    case CoarseKind::kExternalFile:
      return "file:" + origin;
  }
  return "unknown";
}

Schedule balanced_topo_partition(const ComputeGraph &g, int num_stages) {
  check_stage_count(g, num_stages);
  const auto order = asap_order(g, asap_levels(g));
  const Bytes total = g.total_param_bytes();
  const Bytes K = num_stages;
  const std::size_t n = order.size();

  Schedule s{num_stages, std::vector<Stage>(n, 0)};
  Stage k = 0;
  Bytes cum = 0;
  std::size_t in_stage = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = order[i];
    const Bytes p = g.node(v).param_bytes;
    if (in_stage > 0 && k < num_stages - 1) {
      const bool forced = n - i == static_cast<std::size_t>(num_stages - 1 - k);
      // Compare |K*cum - total*(k+1)| before and after taking v, in exact integers.
      const Bytes boundary = total * (k + 1);
      const bool overshoots = std::llabs(K * (cum + p) - boundary) > std::llabs(K * cum - boundary);
      if (forced || overshoots) {
        ++k;
        in_stage = 0;
      }
    }
    s.stage[v] = k;
    cum += p;
    ++in_stage;
  }
  return s;
}

Schedule list_schedule(const ComputeGraph &g, int num_stages) {
  check_stage_count(g, num_stages);
  const auto levels = asap_levels(g);
  const std::size_t n = g.num_nodes();
  const Bytes total = g.total_param_bytes();

  auto higher = [&](NodeId a, NodeId b) {
    const auto &na = g.node(a);
    const auto &nb = g.node(b);
    if (na.out_bytes != nb.out_bytes) return na.out_bytes > nb.out_bytes;
    if (levels[a] != levels[b]) return levels[a] < levels[b];
    return a < b;
  };

  std::vector<std::size_t> waiting(n);
  std::vector<NodeId> ready;
  for (std::size_t v = 0; v < n; ++v) {
    waiting[v] = g.preds(static_cast<NodeId>(v)).size();
    if (waiting[v] == 0) ready.push_back(static_cast<NodeId>(v));
  }

  Schedule s{num_stages, std::vector<Stage>(n, kUnassigned)};
  Stage k = 0;
  Bytes mem = 0;
  std::size_t in_stage = 0;
  for (std::size_t placed = 0; placed < n; ++placed) {
    auto best = std::min_element(ready.begin(), ready.end(), higher);
    const NodeId v = *best;
    ready.erase(best);
    const std::size_t remaining = n - placed;
    const Bytes p = g.node(v).param_bytes;
    // Advance when v would push a non-empty stage past total/K, or when the
    // remaining nodes are just enough to fill the remaining stages.
    const bool full = Bytes{num_stages} * (mem + p) > total;
    const bool forced = remaining == static_cast<std::size_t>(num_stages - 1 - k);
    if (in_stage > 0 && k < num_stages - 1 && (full || forced)) {
      ++k;
      mem = 0;
      in_stage = 0;
    }
    s.stage[v] = k;
    mem += p;
    ++in_stage;
    for (NodeId w : g.succs(v)) {
      if (--waiting[w] == 0) ready.push_back(w);
    }
  }
  return s;
}

Schedule load_coarse_schedule(const std::filesystem::path &path, const ComputeGraph &g, int num_stages) {
  ScheduleFile file = parse_schedule(read_text_file(path));
  if (file.num_stages != num_stages) {
    throw Error(kModule, "schedule file has num_stages=" + std::to_string(file.num_stages) + ", expected " +
                             std::to_string(num_stages));
  }
  const auto n = static_cast<std::int64_t>(g.num_nodes());
  Schedule s{num_stages, std::vector<Stage>(g.num_nodes(), kUnassigned)};
  for (const auto &[id, stage] : file.assignment) {
    if (id < 0 || id >= n) throw Error(kModule, "unknown node " + std::to_string(id));
    if (stage < 0 || stage >= num_stages) {
      throw Error(kModule, "stage out of range: node " + std::to_string(id) + " -> " + std::to_string(stage));
    }
    s.stage[static_cast<std::size_t>(id)] = static_cast<Stage>(stage);
  }
  auto missing = std::count(s.stage.begin(), s.stage.end(), kUnassigned);
  if (missing > 0) throw Error(kModule, "missing nodes: " + std::to_string(missing) + " unassigned");
  return s;
}

RepairResult repair_schedule(const ComputeGraph &g, const Schedule &s, const SchedulePolicy &policy) {
  if (s.stage.size() != g.num_nodes() || std::count(s.stage.begin(), s.stage.end(), kUnassigned) > 0) {
    throw Error(kModule, "repair needs a total assignment");
  }
  const int K = s.num_stages;
  if (K < 1) throw Error(kModule, "num_stages must be >= 1");
  if (policy.require_nonempty_stages && static_cast<std::size_t>(K) > g.num_nodes()) {
    throw Error(kModule, "unrepairable: K=" + std::to_string(K) + " exceeds |V|=" + std::to_string(g.num_nodes()));
  }
  Schedule out = s;
  for (auto &st : out.stage) st = std::clamp(st, 0, K - 1);
  for (NodeId v : g.topo_order()) {
    for (NodeId u : g.preds(v)) out.stage[v] = std::max(out.stage[v], out.stage[u]);
  }

  if (policy.require_nonempty_stages) {
    // Sorting by (stage, level, id) gives a topological order in which stages
    // are contiguous runs; fixing the cut positions keeps the result monotone.
    const auto levels = asap_levels(g);
    std::vector<NodeId> seq(g.num_nodes());
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<NodeId>(i);
    std::sort(seq.begin(), seq.end(), [&](NodeId a, NodeId b) {
      if (out.stage[a] != out.stage[b]) return out.stage[a] < out.stage[b];
      if (levels[a] != levels[b]) return levels[a] < levels[b];
      return a < b;
    });
    const auto n = static_cast<std::int64_t>(seq.size());
    // cut[k] = index in seq where stage k starts; cut[0] = 0, cut[K] = n.
    std::vector<std::int64_t> cut(static_cast<std::size_t>(K) + 1, 0);
    cut[K] = n;
    for (int k = 1; k < K; ++k) {
      cut[k] = std::count_if(seq.begin(), seq.end(), [&](NodeId v) { return out.stage[v] < k; });
    }
    for (int k = 1; k < K; ++k) cut[k] = std::max(cut[k], cut[k - 1] + 1);
    for (int k = K - 1; k >= 1; --k) cut[k] = std::min(cut[k], cut[k + 1] - 1);
    for (int k = 0; k < K; ++k) {
      for (auto i = cut[k]; i < cut[k + 1]; ++i) out.stage[seq[static_cast<std::size_t>(i)]] = k;
    }
  }
  bool changed = out.stage != s.stage;
  return {std::move(out), changed};
}

Schedule produce_coarse(const CoarseSource &source, const ComputeGraph &g, int num_stages) {
  switch (source.kind) {
    case CoarseKind::kHeuristicBalanced:
      return balanced_topo_partition(g, num_stages);
    case CoarseKind::kListSchedule:
      return list_schedule(g, num_stages);
    case CoarseKind::kExternalFile:
      return load_coarse_schedule(source.origin, g, num_stages);
  }
  throw Error(kModule, "unknown coarse source kind");
}

}  // namespace incsched
