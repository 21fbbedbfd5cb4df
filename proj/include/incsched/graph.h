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

#ifndef INCSCHED_GRAPH_H_
#define INCSCHED_GRAPH_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace incsched {

using Bytes = std::int64_t;
using NodeId = std::int32_t;
using Stage = std::int32_t;

inline constexpr Stage kUnassigned = -1;
inline constexpr Bytes kDefaultCacheBytes = Bytes{8} * 1024 * 1024;

struct NodeAttr {
  NodeId id = 0;
  std::string name;
  Bytes param_bytes = 0;
  Bytes out_bytes = 0;

  bool operator==(const NodeAttr &) const = default;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  auto operator<=>(const Edge &) const = default;
};

// Immutable operator DAG. Node ids are dense 0..n-1; the tensor carried by an
// edge is its producer's output, so t_e = out_bytes(src).
class ComputeGraph {
 public:
  ComputeGraph() = default;
  // Validates ids, attributes, duplicate edges and acyclicity; throws Error.
  ComputeGraph(std::vector<NodeAttr> nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const NodeAttr &node(NodeId v) const { return nodes_[static_cast<std::size_t>(v)]; }
  const std::vector<NodeAttr> &nodes() const { return nodes_; }
  const std::vector<Edge> &edges() const { return edges_; }

  std::span<const NodeId> preds(NodeId v) const;
  std::span<const NodeId> succs(NodeId v) const;
  // Kahn order, smallest ready id first.
  const std::vector<NodeId> &topo_order() const { return topo_; }

  Bytes tensor_bytes(const Edge &e) const { return node(e.src).out_bytes; }
  Bytes total_param_bytes() const { return total_param_; }

  bool operator==(const ComputeGraph &other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<NodeAttr> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> pred_offsets_;
  std::vector<NodeId> pred_ids_;
  std::vector<std::size_t> succ_offsets_;
  std::vector<NodeId> succ_ids_;
  std::vector<NodeId> topo_;
  Bytes total_param_ = 0;
};

// ASAP leveling: sources sit at 0, everything else one past its deepest parent.
std::vector<int> asap_levels(const ComputeGraph &g);
int graph_depth(const std::vector<int> &levels);
// Nodes sorted by (level, id). This is a topological order.
std::vector<NodeId> asap_order(const ComputeGraph &g, const std::vector<int> &levels);

struct Schedule {
  int num_stages = 1;
  std::vector<Stage> stage;  // indexed by node id; kUnassigned marks a hole

  bool operator==(const Schedule &) const = default;
};

struct SchedulePolicy {
  // A K-stage pipeline binds K devices, so every stage hosts at least one node.
  bool require_nonempty_stages = true;
};

enum class ViolationKind { kSizeMismatch, kUnassigned, kStageOutOfRange, kDependence, kEmptyStage };

struct Violation {
  ViolationKind kind;
  NodeId src = -1;
  NodeId dst = -1;
  Stage stage = kUnassigned;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

ValidationReport validate_schedule(const ComputeGraph &g, const Schedule &s, const SchedulePolicy &policy = {});

enum class ObjectiveOrder { kPeakOffcacheComm, kPeakCommOffcache };

struct ObjectiveVector {
  Bytes peak_mem = 0;
  Bytes total_offcache = 0;
  Bytes max_comm = 0;

  bool operator==(const ObjectiveVector &) const = default;
};

// Components in comparison priority for the given order.
std::array<Bytes, 3> ranked(const ObjectiveVector &v, ObjectiveOrder order);
bool lex_less(const ObjectiveVector &a, const ObjectiveVector &b, ObjectiveOrder order);
inline bool lex_less_equal(const ObjectiveVector &a, const ObjectiveVector &b, ObjectiveOrder order) {
  return !lex_less(b, a, order);
}

struct ScheduleMetrics {
  std::vector<Bytes> per_stage_mem;
  Bytes peak_mem = 0;
  std::vector<Bytes> per_stage_offcache;
  Bytes total_offcache = 0;
  std::vector<Bytes> per_boundary_comm;  // size K-1; entry k sums edges leaving stage k forward
  Bytes max_comm = 0;

  ObjectiveVector objective_vector() const { return {peak_mem, total_offcache, max_comm}; }
};

// Throws Error when the schedule has dependence, totality or range violations.
// Empty stages are allowed here; they are a policy matter for validation.
ScheduleMetrics schedule_metrics(const ComputeGraph &g, const Schedule &s, Bytes cache_capacity = kDefaultCacheBytes);

}  // namespace incsched

#endif  // INCSCHED_GRAPH_H_
