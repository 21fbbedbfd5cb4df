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

#ifndef INCSCHED_BENCH_H_
#define INCSCHED_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "incsched/dag_gen.h"
#include "incsched/error.h"
#include "incsched/pipeline.h"

namespace incsched {

// Bad command-line input; the CLI maps it to exit code 2.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string &message) : Error("usage", message) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIncumbent = 3;

struct RunConfig {
  std::optional<std::filesystem::path> graph;
  std::optional<std::filesystem::path> corpus;  // manifest.json or its directory
  std::optional<std::filesystem::path> schedule;  // validate only
  int num_nodes = 30;
  std::vector<int> degrees{2};
  int count = 10;
  int num_stages = 4;
  int gamma = 0;
  int gamma_lo = 0;
  int gamma_hi = 10;
  CoarseSource coarse;
  Bytes cache_capacity = kDefaultCacheBytes;
  double time_limit_s = 0.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::filesystem::path out = "run";
  std::optional<std::filesystem::path> dump_domains;
  SolveMode mode = SolveMode::kInc;
  ObjectiveOrder order = ObjectiveOrder::kPeakOffcacheComm;
  bool require_nonempty_stages = true;

  IncConfig pipeline(SolveMode mode, int gamma) const;
  std::string to_json(const std::string &command) const;
};

// A loaded input graph and the name used for its output files.
struct Instance {
  std::string name;
  ComputeGraph graph;
};

std::vector<Instance> load_instances(const RunConfig &cfg);

// Runs fn(i) for i in [0, n) on up to jobs threads. Exceptions are rethrown
// after all workers stop, lowest index first.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

std::string csv_escape(const std::string &field);

// Subcommands. Each writes its run directory under cfg.out and a short
// summary to out, and returns the process exit code.
int cmd_generate(const RunConfig &cfg, std::ostream &out);
int cmd_schedule(const RunConfig &cfg, std::ostream &out);
int cmd_sweep(const RunConfig &cfg, std::ostream &out);
int cmd_compare(const RunConfig &cfg, std::ostream &out);
int cmd_export_labels(const RunConfig &cfg, std::ostream &out);
int cmd_validate(const RunConfig &cfg, std::ostream &out);

// Column headers, frozen under kFormatVersion.
inline constexpr const char *kScheduleColumns =
    "graph,mode,gamma,producer,peak,offcache,comm,coarse_peak,coarse_offcache,coarse_comm,proved_optimal,"
    "nodes_expanded,free_nodes,total_nodes,wall_time_s";
inline constexpr const char *kSweepColumns =
    "graph,gamma,peak,offcache,comm,gap_pct,nodes_expanded,wall_time_s,proved_optimal,free_nodes";
inline constexpr const char *kCompareColumns =
    "graph,method,gamma,peak,offcache,comm,proved_optimal,matches_optimum,nodes_expanded,free_nodes,wall_time_s";

}  // namespace incsched

#endif  // INCSCHED_BENCH_H_
