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

#ifndef INCSCHED_SOLVER_H_
#define INCSCHED_SOLVER_H_

#include <cstdint>
#include <optional>
#include <string>

#include "incsched/graph.h"
#include "incsched/model.h"
#include "incsched/relaxation.h"

namespace incsched {

struct SolveOptions {
  double time_limit_s = 0.0;  // <= 0 means no limit
  ObjectiveOrder order = ObjectiveOrder::kPeakOffcacheComm;
  // Initial incumbent and preferred branch values. Ignored if it lies outside
  // the domains or violates the model.
  std::optional<Schedule> warm_start;
};

struct SolveReport {
  Schedule schedule;
  ObjectiveVector objective;
  bool proved_optimal = false;
  std::uint64_t nodes_expanded = 0;
  double wall_time_s = 0.0;
  std::optional<int> gamma;  // none for a full exact solve
  std::string producer;
  std::optional<ObjectiveVector> coarse_objective;
  std::size_t free_nodes = 0;
  std::size_t total_nodes = 0;
};

// Lexicographic optimum by staged branch-and-bound: minimize the first ranked
// objective, pin it, minimize the second, pin it, minimize the third. Nodes are
// branched in ASAP order over their admissible stages.
// Throws Error for an infeasible model. On timeout, returns the incumbent with
// proved_optimal = false.
SolveReport solve_lex(const ScheduleModel &model, const SolveOptions &options = {});

inline constexpr std::uint64_t kBruteForceGuard = 10'000'000;

// Exhaustive enumeration of the domain product, scored with schedule_metrics.
// Ties go to the lexicographically smallest assignment vector.
SolveReport brute_force(const ComputeGraph &g, int num_stages, const StageDomains &domains,
                        Bytes cache_capacity = kDefaultCacheBytes, const SchedulePolicy &policy = {},
                        ObjectiveOrder order = ObjectiveOrder::kPeakOffcacheComm);

std::string objective_json(const ObjectiveVector &v);
std::string report_json(const SolveReport &r);

}  // namespace incsched

#endif  // INCSCHED_SOLVER_H_
