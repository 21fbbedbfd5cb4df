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

#include "incsched/pipeline.h"

#include "incsched/error.h"
#include "incsched/model.h"

namespace incsched {
namespace {
constexpr const char *kModule = "pipeline";

std::string vector_text(const ObjectiveVector &v) {
  return "(" + std::to_string(v.peak_mem) + ", " + std::to_string(v.total_offcache) + ", " +
         std::to_string(v.max_comm) + ")";
}
}  // namespace

SolveMode parse_mode(const std::string &text) {
  if (text == "inc") return SolveMode::kInc;
  if (text == "exact") return SolveMode::kExact;
  if (text == "coarse") return SolveMode::kCoarse;
  throw Error(kModule, "unknown mode: " + text);
}

const char *mode_name(SolveMode mode) {
  switch (mode) {
    case SolveMode::kInc: return "inc";
    case SolveMode::kExact: return "exact";
    case SolveMode::kCoarse: return "coarse";
  }
  return "?";
}

PipelineResult run_pipeline(const ComputeGraph &g, const IncConfig &config) {
  if (config.num_stages < 1) throw Error(kModule, "K must be >= 1");
  PipelineResult out;
  const Schedule produced = produce_coarse(config.coarse, g, config.num_stages);
  auto repaired = repair_schedule(g, produced, config.policy);
  out.coarse = std::move(repaired.schedule);
  out.coarse_repaired = repaired.changed;
  if (repaired.changed) out.log.push_back("coarse schedule from " + config.coarse.to_string() + " repaired");
  const auto coarse_vec = schedule_metrics(g, out.coarse, config.cache_capacity).objective_vector();
  out.log.push_back("coarse objective " + vector_text(coarse_vec));

  if (config.mode == SolveMode::kCoarse) {
    out.domains = StageDomains::fixed(out.coarse);
    out.report.schedule = out.coarse;
    out.report.objective = coarse_vec;
    out.report.total_nodes = g.num_nodes();
  } else {
    if (config.mode == SolveMode::kInc) {
      out.window = relax_window(g, out.coarse, config.gamma);
      out.domains = build_domains(g, out.coarse, out.window, config.num_stages);
      out.log.push_back("window levels [" + std::to_string(out.window.lo_level) + ", " +
                        std::to_string(out.window.hi_level) + "], " + std::to_string(out.window.free_nodes.size()) +
                        " free of " + std::to_string(g.num_nodes()));
    } else {
      out.domains = StageDomains::full(g.num_nodes(), config.num_stages);
    }
    const auto model = build_model(g, config.num_stages, out.domains, config.cache_capacity, config.policy);
    SolveOptions options;
    options.time_limit_s = config.time_limit_s;
    options.order = config.order;
    options.warm_start = out.coarse;
    out.report = solve_lex(model, options);
    if (lex_less(coarse_vec, out.report.objective, config.order)) {
      throw Error(kModule, "internal invariant failure: refined objective " + vector_text(out.report.objective) +
                               " is worse than coarse " + vector_text(coarse_vec));
    }
    out.log.push_back(std::string(mode_name(config.mode)) + " objective " + vector_text(out.report.objective) +
                      (out.report.proved_optimal ? " (optimal)" : " (incumbent)") + ", " +
                      std::to_string(out.report.nodes_expanded) + " nodes");
  }
  if (config.mode == SolveMode::kInc) out.report.gamma = config.gamma;
  out.report.producer = config.coarse.to_string();
  out.report.coarse_objective = coarse_vec;
  return out;
}

}  // namespace incsched
