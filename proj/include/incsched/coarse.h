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

#ifndef INCSCHED_COARSE_H_
#define INCSCHED_COARSE_H_

#include <filesystem>
#include <string>

#include "incsched/graph.h"

namespace incsched {

enum class CoarseKind { kHeuristicBalanced, kListSchedule, kExternalFile };

struct CoarseSource {
  CoarseKind kind = CoarseKind::kHeuristicBalanced;
  std::string origin;  // algorithm name or file path

  // "balanced", "list" or "file:PATH".
  static CoarseSource parse(const std::string &text);
  std::string to_string() const;
};

// Greedy split of the ASAP order into K contiguous runs whose parameter
// totals track multiples of total/K. Stages are never left empty.
Schedule balanced_topo_partition(const ComputeGraph &g, int num_stages);

// Ready-list scheduler: highest out_bytes first (then ASAP level, then id).
// A node that would push a non-empty stage past total/K opens the next stage.
Schedule list_schedule(const ComputeGraph &g, int num_stages);

// Loads an externally produced schedule without repairing it.
Schedule load_coarse_schedule(const std::filesystem::path &path, const ComputeGraph &g, int num_stages);

struct RepairResult {
  Schedule schedule;
  bool changed = false;
};

// Forward projection s'_v = max(s_v, max over preds s'_u), followed by
// shifting stage cuts so no stage is empty (when the policy asks for it).
RepairResult repair_schedule(const ComputeGraph &g, const Schedule &s, const SchedulePolicy &policy = {});

// Runs the producer named by source.
Schedule produce_coarse(const CoarseSource &source, const ComputeGraph &g, int num_stages);

}  // namespace incsched

#endif  // INCSCHED_COARSE_H_
