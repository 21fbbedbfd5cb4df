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

// incsched command-line driver.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "incsched/bench.h"

namespace {

using incsched::RunConfig;

struct Flags {
  std::string graph, corpus, schedule, coarse = "balanced", mode = "inc", gamma_range, order = "peak,offcache,comm";
  std::string out = "run", dump_domains;
  bool allow_empty_stages = false;
};

void add_solve_flags(CLI::App *cmd, RunConfig &cfg, Flags &f) {
  cmd->add_option("--graph", f.graph, "Graph file");
  cmd->add_option("--corpus", f.corpus, "Corpus directory or manifest.json");
  cmd->add_option("--stages", cfg.num_stages, "Number of pipeline stages K");
  cmd->add_option("--coarse", f.coarse, "Coarse producer: balanced, list or file:PATH");
  cmd->add_option("--cache-bytes", cfg.cache_capacity, "Per-device cache capacity in bytes");
  cmd->add_option("--time-limit-s", cfg.time_limit_s, "Per-solve time limit in seconds (0 = none)");
  cmd->add_option("--seed", cfg.seed, "Master seed");
  cmd->add_option("--jobs", cfg.jobs, "Instances solved in parallel");
  cmd->add_option("--out", f.out, "Run directory");
  cmd->add_option("--objective-order", f.order, "peak,offcache,comm or peak,comm,offcache");
  cmd->add_flag("--allow-empty-stages", f.allow_empty_stages, "Do not require every stage to host a node");
}

void finish(RunConfig &cfg, const Flags &f) {
  if (!f.graph.empty()) cfg.graph = f.graph;
  if (!f.corpus.empty()) cfg.corpus = f.corpus;
  if (!f.schedule.empty()) cfg.schedule = f.schedule;
  if (!f.dump_domains.empty()) cfg.dump_domains = f.dump_domains;
  cfg.out = f.out;
  try {
    cfg.coarse = incsched::CoarseSource::parse(f.coarse);
    cfg.mode = incsched::parse_mode(f.mode);
  } catch (const incsched::Error &e) {
    throw incsched::UsageError(e.message());
  }
  cfg.require_nonempty_stages = !f.allow_empty_stages;
  if (f.order == "peak,offcache,comm") {
    cfg.order = incsched::ObjectiveOrder::kPeakOffcacheComm;
  } else if (f.order == "peak,comm,offcache") {
    cfg.order = incsched::ObjectiveOrder::kPeakCommOffcache;
  } else {
    throw incsched::UsageError("unknown --objective-order: " + f.order);
  }
  if (!f.gamma_range.empty()) {
    const auto colon = f.gamma_range.find(':');
    try {
      if (colon == std::string::npos) {
        cfg.gamma_lo = cfg.gamma_hi = std::stoi(f.gamma_range);
      } else {
        cfg.gamma_lo = std::stoi(f.gamma_range.substr(0, colon));
        cfg.gamma_hi = std::stoi(f.gamma_range.substr(colon + 1));
      }
    } catch (const std::exception &) {
      throw incsched::UsageError("--gamma-range expects LO:HI");
    }
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Pipeline stage scheduling with incremental exact refinement"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags f;

  auto *gen = app.add_subcommand("generate", "Generate a random DAG corpus");
  gen->add_option("--nodes", cfg.num_nodes, "Nodes per graph, including virtual endpoints");
  gen->add_option("--deg", cfg.degrees, "Maximum in-degree values")->delimiter(',');
  gen->add_option("--count", cfg.count, "Graphs per degree");
  gen->add_option("--seed", cfg.seed, "Master seed");
  gen->add_option("--out", f.out, "Corpus directory");

  auto *sched = app.add_subcommand("schedule", "Schedule one graph or a corpus");
  add_solve_flags(sched, cfg, f);
  sched->add_option("--gamma", cfg.gamma, "Relaxation level");
  sched->add_option("--mode", f.mode, "inc, exact or coarse");
  sched->add_option("--dump-domains", f.dump_domains, "Write the relaxed stage domains as JSON");

  auto *sweep = app.add_subcommand("sweep", "Sweep the relaxation level against the exact optimum");
  add_solve_flags(sweep, cfg, f);
  sweep->add_option("--gamma-range", f.gamma_range, "LO:HI (default 0:10)");

  auto *cmp = app.add_subcommand("compare", "Compare exact, coarse-only and incremental solving");
  add_solve_flags(cmp, cfg, f);
  cmp->add_option("--gamma", cfg.gamma, "Relaxation level for the incremental method");

  auto *labels = app.add_subcommand("export-labels", "Export graphs with exact optimal schedules");
  add_solve_flags(labels, cfg, f);
  labels->add_option("--nodes", cfg.num_nodes, "Nodes per graph, including virtual endpoints");
  labels->add_option("--deg", cfg.degrees, "Maximum in-degree values, cycled")->delimiter(',');
  labels->add_option("--count", cfg.count, "Number of labeled graphs");

  auto *val = app.add_subcommand("validate", "Validate a graph, a corpus or a schedule file");
  val->add_option("--graph", f.graph, "Graph file");
  val->add_option("--corpus", f.corpus, "Corpus directory or manifest.json");
  val->add_option("--schedule", f.schedule, "Schedule file to check against --graph");
  val->add_option("--cache-bytes", cfg.cache_capacity, "Per-device cache capacity in bytes");
  val->add_flag("--allow-empty-stages", f.allow_empty_stages, "Do not require every stage to host a node");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : incsched::kExitUsage;
  }

  try {
    finish(cfg, f);
    if (gen->parsed()) return incsched::cmd_generate(cfg, std::cout);
    if (sched->parsed()) return incsched::cmd_schedule(cfg, std::cout);
    if (sweep->parsed()) return incsched::cmd_sweep(cfg, std::cout);
    if (cmp->parsed()) return incsched::cmd_compare(cfg, std::cout);
    if (labels->parsed()) return incsched::cmd_export_labels(cfg, std::cout);
    if (val->parsed()) return incsched::cmd_validate(cfg, std::cout);
  } catch (const incsched::UsageError &e) {
    std::cerr << "usage error: " << e.message() << "\n";
    return incsched::kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return incsched::kExitRuntime;
  }
  return incsched::kExitUsage;
}
