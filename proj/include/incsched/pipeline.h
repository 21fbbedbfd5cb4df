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

#ifndef INCSCHED_PIPELINE_H_
#define INCSCHED_PIPELINE_H_

#include <string>
#include <vector>

#include "incsched/coarse.h"
#include "incsched/graph.h"
#include "incsched/relaxation.h"
#include "incsched/solver.h"

namespace incsched {

enum class SolveMode { kInc, kExact, kCoarse };

SolveMode parse_mode(const std::string &text);
const char *mode_name(SolveMode mode);

struct IncConfig {
  int num_stages = 4;
  int gamma = 0;
  CoarseSource coarse;
  Bytes cache_capacity = kDefaultCacheBytes;
  double time_limit_s = 0.0;
  SchedulePolicy policy;
  ObjectiveOrder order = ObjectiveOrder::kPeakOffcacheComm;
  SolveMode mode = SolveMode::kInc;
};

struct PipelineResult {
  SolveReport report;
  Schedule coarse;        // after repair
  bool coarse_repaired = false;
  RelaxWindow window;     // empty for exact and coarse modes
  StageDomains domains;
  std::vector<std::string> log;
};

// coarse producer -> repair -> window(gamma) -> domains -> model -> solve_lex,
// warm-started from the coarse schedule. Exact mode skips the window and opens
// every domain; coarse mode stops after repair.
PipelineResult run_pipeline(const ComputeGraph &g, const IncConfig &config);

inline SolveReport inc_ilp(const ComputeGraph &g, const IncConfig &config) { return run_pipeline(g, config).report; }

}  // namespace incsched

#endif  // INCSCHED_PIPELINE_H_
