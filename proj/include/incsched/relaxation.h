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

#ifndef INCSCHED_RELAXATION_H_
#define INCSCHED_RELAXATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "incsched/graph.h"

namespace incsched {

inline constexpr int kMaxStages = 64;

// Edges whose endpoints sit in different stages (s_src < s_dst).
std::vector<Edge> boundary_edges(const ComputeGraph &g, const Schedule &s);

// Band of ASAP levels [lo_level, hi_level] whose nodes are re-solved exactly.
struct RelaxWindow {
  bool empty = true;  // no boundary edges: every node frozen
  int lo_level = 0;
  int hi_level = -1;
  int gamma = 0;
  std::vector<NodeId> free_nodes;
  std::vector<NodeId> frozen_nodes;
};

RelaxWindow relax_window(const ComputeGraph &g, const Schedule &s, int gamma);

// Admissible stage set per node, stored as a bit mask (K <= 64).
class StageDomains {
 public:
  StageDomains() = default;
  StageDomains(int num_stages, std::vector<std::uint64_t> masks);

  static StageDomains full(std::size_t num_nodes, int num_stages);
  static StageDomains fixed(const Schedule &s);

  int num_stages() const { return num_stages_; }
  std::size_t size() const { return masks_.size(); }
  std::uint64_t mask(NodeId v) const { return masks_[static_cast<std::size_t>(v)]; }
  bool contains(NodeId v, Stage k) const { return k >= 0 && k < num_stages_ && ((mask(v) >> k) & 1U); }
  bool is_singleton(NodeId v) const;
  int count(NodeId v) const;
  Stage min_stage(NodeId v) const;
  Stage max_stage(NodeId v) const;
  std::vector<Stage> stages(NodeId v) const;
  bool admits(const Schedule &s) const;

 private:
  int num_stages_ = 0;
  std::vector<std::uint64_t> masks_;
};

// Frozen nodes keep their coarse stage; free nodes range over all K stages.
StageDomains build_domains(const ComputeGraph &g, const Schedule &s, const RelaxWindow &w, int num_stages);

// Debug dump consumed by --dump-domains.
std::string domains_json(const ComputeGraph &g, const RelaxWindow &w, const StageDomains &d);

}  // namespace incsched

#endif  // INCSCHED_RELAXATION_H_
