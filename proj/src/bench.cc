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

#include "incsched/bench.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "incsched/io.h"
#include "incsched/solver.h"
#include "json.hpp"

namespace incsched {
namespace {
constexpr const char *kModule = "bench-harness";
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

const char *flag(bool b) { return b ? "true" : "false"; }

ojson vector_json(const ObjectiveVector &v) { return ojson::array({v.peak_mem, v.total_offcache, v.max_comm}); }

std::string file_producer(const RunConfig &cfg, SolveMode mode) {
  return std::string(mode_name(mode)) + ":" + cfg.coarse.to_string();
}

// Per-instance output collected by index so files are written in a fixed order.
struct Rows {
  std::vector<std::string> csv;
  std::vector<std::string> log;
};

void write_run(const fs::path &dir, const std::string &command, const RunConfig &cfg, const char *columns,
               const std::vector<Rows> &rows) {
  fs::create_directories(dir);
  write_text_file(dir / "config.json", cfg.to_json(command));
  std::string csv = columns != nullptr ? std::string(columns) + "\n" : std::string();
  std::string log;
  for (const auto &r : rows) {
    for (const auto &line : r.csv) csv += line + "\n";
    for (const auto &line : r.log) log += line + "\n";
  }
  if (columns != nullptr) write_text_file(dir / "results.csv", csv);
  write_text_file(dir / "run.log", log);
}

void check_common(const RunConfig &cfg) {
  if (cfg.num_stages < 1) throw UsageError("--stages must be >= 1");
  if (cfg.num_stages > kMaxStages) throw UsageError("--stages must be <= " + std::to_string(kMaxStages));
  if (cfg.gamma < 0) throw UsageError("--gamma must be >= 0");
  if (cfg.cache_capacity < 0) throw UsageError("--cache-bytes must be >= 0");
  if (cfg.jobs < 1) throw UsageError("--jobs must be >= 1");
}

bool all_proved(const std::vector<char> &flags) {
  return std::all_of(flags.begin(), flags.end(), [](char c) { return c != 0; });
}
}  // namespace

IncConfig RunConfig::pipeline(SolveMode m, int g) const {
  IncConfig c;
  c.num_stages = num_stages;
  c.gamma = g;
  c.coarse = coarse;
  c.cache_capacity = cache_capacity;
  c.time_limit_s = time_limit_s;
  c.policy.require_nonempty_stages = require_nonempty_stages;
  c.order = order;
  c.mode = m;
  return c;
}

std::string RunConfig::to_json(const std::string &command) const {
  ojson j;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  j["graph"] = graph ? ojson(graph->generic_string()) : ojson(nullptr);
  j["corpus"] = corpus ? ojson(corpus->generic_string()) : ojson(nullptr);
  j["num_nodes"] = num_nodes;
  j["degrees"] = degrees;
  j["count"] = count;
  j["num_stages"] = num_stages;
  j["gamma"] = gamma;
  j["gamma_range"] = {gamma_lo, gamma_hi};
  j["coarse"] = coarse.to_string();
  j["cache_bytes"] = cache_capacity;
  j["time_limit_s"] = time_limit_s;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["mode"] = mode_name(mode);
  j["objective_order"] = order == ObjectiveOrder::kPeakOffcacheComm ? "peak,offcache,comm" : "peak,comm,offcache";
  j["require_nonempty_stages"] = require_nonempty_stages;
  return j.dump(2) + "\n";
}

std::vector<Instance> load_instances(const RunConfig &cfg) {
  if (cfg.graph.has_value() == cfg.corpus.has_value()) {
    throw UsageError("exactly one of --graph or --corpus is required");
  }
  std::vector<Instance> out;
  if (cfg.graph) {
    out.push_back({cfg.graph->stem().string(), read_graph_file(*cfg.graph)});
    return out;
  }
  fs::path manifest = *cfg.corpus;
  if (fs::is_directory(manifest)) manifest /= "manifest.json";
  const auto entries = read_manifest(manifest);
  if (entries.empty()) throw UsageError("corpus is empty: " + manifest.generic_string());
  for (const auto &e : entries) {
    const fs::path p = manifest.parent_path() / e.path;
    out.push_back({p.stem().string(), read_graph_file(p)});
  }
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string csv_escape(const std::string &field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int cmd_generate(const RunConfig &cfg, std::ostream &out) {
  if (cfg.count < 1) throw UsageError("--count must be >= 1");
  if (cfg.degrees.empty()) throw UsageError("--deg needs at least one value");
  GenSpec tmpl;
  tmpl.num_nodes = cfg.num_nodes;
  const auto corpus = generate_corpus(tmpl, cfg.degrees, cfg.count, cfg.seed);
  write_corpus(cfg.out, corpus);
  Rows rows;
  for (const auto &e : corpus) {
    rows.log.push_back(e.path + " seed=" + std::to_string(e.spec.seed) + " depth=" + std::to_string(e.depth));
  }
  write_run(cfg.out, "generate", cfg, nullptr, {rows});
  out << "wrote " << corpus.size() << " graphs to " << (cfg.out / "manifest.json").generic_string() << "\n";
  return kExitOk;
}

int cmd_schedule(const RunConfig &cfg, std::ostream &out) {
  check_common(cfg);
  const auto instances = load_instances(cfg);
  std::vector<Rows> rows(instances.size());
  std::vector<std::string> reports(instances.size());
  std::vector<char> proved(instances.size(), 0);
  parallel_for(instances.size(), cfg.jobs, [&](std::size_t i) {
    const auto &inst = instances[i];
    const auto result = run_pipeline(inst.graph, cfg.pipeline(cfg.mode, cfg.gamma));
    const auto &r = result.report;
    ScheduleMeta meta{file_producer(cfg, cfg.mode), r.gamma};
    write_schedule_file(cfg.out / "schedules" / (inst.name + ".json"), r.schedule, meta);
    reports[i] = report_json(r);
    write_text_file(cfg.out / "reports" / (inst.name + ".json"), reports[i]);
    if (cfg.dump_domains) {
      const fs::path target = instances.size() == 1 ? *cfg.dump_domains : *cfg.dump_domains / (inst.name + ".json");
      write_text_file(target, domains_json(inst.graph, result.window, result.domains));
    }
    proved[i] = cfg.mode == SolveMode::kCoarse || r.proved_optimal;
    const auto &c = *r.coarse_objective;
    rows[i].csv.push_back(csv_escape(inst.name) + "," + mode_name(cfg.mode) + "," +
                          (r.gamma ? std::to_string(*r.gamma) : "") + "," + csv_escape(r.producer) + "," +
                          std::to_string(r.objective.peak_mem) + "," + std::to_string(r.objective.total_offcache) +
                          "," + std::to_string(r.objective.max_comm) + "," + std::to_string(c.peak_mem) + "," +
                          std::to_string(c.total_offcache) + "," + std::to_string(c.max_comm) + "," +
                          flag(r.proved_optimal) + "," + std::to_string(r.nodes_expanded) + "," +
                          std::to_string(r.free_nodes) + "," + std::to_string(r.total_nodes) + "," +
                          fixed(r.wall_time_s, 6));
    for (const auto &line : result.log) rows[i].log.push_back(inst.name + ": " + line);
  });
  write_run(cfg.out, "schedule", cfg, kScheduleColumns, rows);
  if (instances.size() == 1) {
    out << reports.front();
  } else {
    out << "scheduled " << instances.size() << " graphs into " << cfg.out.generic_string() << "\n";
  }
  return all_proved(proved) ? kExitOk : kExitIncumbent;
}

int cmd_sweep(const RunConfig &cfg, std::ostream &out) {
  check_common(cfg);
  if (cfg.gamma_lo < 0 || cfg.gamma_lo > cfg.gamma_hi) throw UsageError("--gamma-range must satisfy 0 <= lo <= hi");
  const auto instances = load_instances(cfg);
  std::vector<Rows> rows(instances.size());
  std::vector<ojson> summary(instances.size());
  std::vector<char> proved(instances.size(), 0);
  parallel_for(instances.size(), cfg.jobs, [&](std::size_t i) {
    const auto &inst = instances[i];
    const auto exact = run_pipeline(inst.graph, cfg.pipeline(SolveMode::kExact, 0));
    const auto &opt = exact.report.objective;
    const bool have_opt = exact.report.proved_optimal;
    bool all = have_opt;
    std::optional<int> gamma_star;
    for (int gamma = cfg.gamma_lo; gamma <= cfg.gamma_hi; ++gamma) {
      const auto inc = run_pipeline(inst.graph, cfg.pipeline(SolveMode::kInc, gamma)).report;
      all = all && inc.proved_optimal;
      std::string gap = "NA";
      if (have_opt) {
        gap = opt.peak_mem == 0 ? fixed(0.0, 4)
                                : fixed(100.0 * static_cast<double>(inc.objective.peak_mem - opt.peak_mem) /
                                            static_cast<double>(opt.peak_mem),
                                        4);
        if (!gamma_star && inc.objective == opt) gamma_star = gamma;
      }
      rows[i].csv.push_back(csv_escape(inst.name) + "," + std::to_string(gamma) + "," +
                            std::to_string(inc.objective.peak_mem) + "," +
                            std::to_string(inc.objective.total_offcache) + "," +
                            std::to_string(inc.objective.max_comm) + "," + gap + "," +
                            std::to_string(inc.nodes_expanded) + "," + fixed(inc.wall_time_s, 6) + "," +
                            flag(inc.proved_optimal) + "," + std::to_string(inc.free_nodes));
    }
    proved[i] = all;
    ojson s;
    s["graph"] = inst.name;
    s["depth"] = graph_depth(asap_levels(inst.graph));
    s["optimum"] = have_opt ? vector_json(opt) : ojson(nullptr);
    s["coarse"] = vector_json(*exact.report.coarse_objective);
    s["gamma_star"] = gamma_star ? ojson(*gamma_star) : ojson(nullptr);
    s["exact_nodes_expanded"] = exact.report.nodes_expanded;
    summary[i] = std::move(s);
    rows[i].log.push_back(inst.name + ": optimum " + (have_opt ? vector_json(opt).dump() : "unavailable") +
                          ", gamma* " + (gamma_star ? std::to_string(*gamma_star) : "none"));
  });
  write_run(cfg.out, "sweep", cfg, kSweepColumns, rows);
  ojson doc;
  doc["format_version"] = kFormatVersion;
  doc["graphs"] = summary;
  write_text_file(cfg.out / "summary.json", doc.dump(2) + "\n");
  out << "swept " << instances.size() << " graphs over gamma [" << cfg.gamma_lo << ", " << cfg.gamma_hi << "] into "
      << cfg.out.generic_string() << "\n";
  return all_proved(proved) ? kExitOk : kExitIncumbent;
}

int cmd_compare(const RunConfig &cfg, std::ostream &out) {
  check_common(cfg);
  const auto instances = load_instances(cfg);
  struct Outcome {
    SolveReport exact, coarse, inc;
  };
  std::vector<Outcome> outcomes(instances.size());
  std::vector<Rows> rows(instances.size());
  parallel_for(instances.size(), cfg.jobs, [&](std::size_t i) {
    const auto &inst = instances[i];
    auto &o = outcomes[i];
    o.exact = run_pipeline(inst.graph, cfg.pipeline(SolveMode::kExact, 0)).report;
    o.coarse = run_pipeline(inst.graph, cfg.pipeline(SolveMode::kCoarse, 0)).report;
    o.inc = run_pipeline(inst.graph, cfg.pipeline(SolveMode::kInc, cfg.gamma)).report;
    const bool have_opt = o.exact.proved_optimal;
    // A coarse schedule is only known optimal through the exact solve.
    o.coarse.proved_optimal = have_opt && o.coarse.objective == o.exact.objective;
    for (const auto *r : {&o.exact, &o.coarse, &o.inc}) {
      const char *method = r == &o.exact ? "exact" : r == &o.coarse ? "coarse" : "inc";
      const std::string matches = have_opt ? flag(r->objective == o.exact.objective) : "NA";
      rows[i].csv.push_back(csv_escape(inst.name) + "," + method + "," + (r->gamma ? std::to_string(*r->gamma) : "") +
                            "," + std::to_string(r->objective.peak_mem) + "," +
                            std::to_string(r->objective.total_offcache) + "," +
                            std::to_string(r->objective.max_comm) + "," + flag(r->proved_optimal) + "," + matches +
                            "," + std::to_string(r->nodes_expanded) + "," + std::to_string(r->free_nodes) + "," +
                            fixed(r->wall_time_s, 6));
    }
    write_schedule_file(cfg.out / "schedules" / (inst.name + ".exact.json"), o.exact.schedule,
                        {file_producer(cfg, SolveMode::kExact), std::nullopt});
    write_schedule_file(cfg.out / "schedules" / (inst.name + ".coarse.json"), o.coarse.schedule,
                        {file_producer(cfg, SolveMode::kCoarse), std::nullopt});
    write_schedule_file(cfg.out / "schedules" / (inst.name + ".inc.json"), o.inc.schedule,
                        {file_producer(cfg, SolveMode::kInc), cfg.gamma});
    rows[i].log.push_back(inst.name + ": exact " + std::to_string(o.exact.nodes_expanded) + " nodes, inc " +
                          std::to_string(o.inc.nodes_expanded) + " nodes");
  });
  write_run(cfg.out, "compare", cfg, kCompareColumns, rows);

  const double n = static_cast<double>(instances.size());
  double effort = 0.0;
  double wall = 0.0;
  std::array<int, 3> matched{};
  std::array<int, 3> closed{};
  int with_opt = 0;
  for (const auto &o : outcomes) {
    effort += static_cast<double>(o.exact.nodes_expanded) / static_cast<double>(std::max<std::uint64_t>(1, o.inc.nodes_expanded));
    wall += o.exact.wall_time_s / std::max(1e-9, o.inc.wall_time_s);
    const std::array<const SolveReport *, 3> rs{&o.exact, &o.coarse, &o.inc};
    with_opt += o.exact.proved_optimal;
    for (int m = 0; m < 3; ++m) {
      closed[m] += rs[m]->proved_optimal;
      matched[m] += o.exact.proved_optimal && rs[m]->objective == o.exact.objective;
    }
  }
  ojson doc;
  doc["format_version"] = kFormatVersion;
  doc["instances"] = instances.size();
  doc["gamma"] = cfg.gamma;
  doc["mean_effort_ratio"] = effort / n;
  doc["mean_wall_speedup"] = wall / n;
  const char *names[3] = {"exact", "coarse", "inc"};
  for (int m = 0; m < 3; ++m) {
    doc["methods"][names[m]] = {{"pct_optimal", with_opt ? 100.0 * matched[m] / with_opt : 0.0},
                                {"pct_proved_optimal", 100.0 * closed[m] / n}};
  }
  write_text_file(cfg.out / "summary.json", doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return closed[0] == static_cast<int>(n) && closed[2] == static_cast<int>(n) ? kExitOk : kExitIncumbent;
}

int cmd_export_labels(const RunConfig &cfg, std::ostream &out) {
  check_common(cfg);
  if (cfg.count < 0) throw UsageError("--count must be >= 0");
  if (cfg.degrees.empty()) throw UsageError("--deg needs at least one value");
  const auto n = static_cast<std::size_t>(cfg.count);
  std::vector<std::optional<ojson>> pairs(n);
  std::vector<Rows> rows(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    GenSpec spec;
    spec.num_nodes = cfg.num_nodes;
    spec.max_in_degree = cfg.degrees[i % cfg.degrees.size()];
    spec.seed = derive_seed(cfg.seed, i);
    const auto g = generate_dag(spec);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "g%04zu", i);
    const auto r = run_pipeline(g, cfg.pipeline(SolveMode::kExact, 0)).report;
    if (!r.proved_optimal) {
      rows[i].log.push_back(std::string(stem) + ": skipped, exact solve timed out");
      return;
    }
    const std::string graph_rel = std::string("graphs/") + stem + ".json";
    const std::string label_rel = std::string("labels/") + stem + ".json";
    write_graph_file(cfg.out / graph_rel, g);
    write_schedule_file(cfg.out / label_rel, r.schedule, {"exact", std::nullopt});

    // Round-trip both files and re-check the label before listing it.
    const auto g2 = read_graph_file(cfg.out / graph_rel);
    const auto label = load_coarse_schedule(cfg.out / label_rel, g2, cfg.num_stages);
    SchedulePolicy policy;
    policy.require_nonempty_stages = cfg.require_nonempty_stages;
    if (!(g2 == g) || label.stage != r.schedule.stage || !validate_schedule(g2, label, policy).ok() ||
        !(schedule_metrics(g2, label, cfg.cache_capacity).objective_vector() == r.objective)) {
      throw Error(kModule, std::string("label verification failed for ") + stem);
    }
    ojson p;
    p["graph"] = graph_rel;
    p["label"] = label_rel;
    p["seed"] = spec.seed;
    p["num_nodes"] = g.num_nodes();
    p["max_in_degree"] = spec.max_in_degree;
    p["depth"] = graph_depth(asap_levels(g));
    p["objective"] = vector_json(r.objective);
    pairs[i] = std::move(p);
    rows[i].log.push_back(std::string(stem) + ": label " + vector_json(r.objective).dump());
  });
  write_run(cfg.out, "export-labels", cfg, nullptr, rows);
  ojson doc;
  doc["format_version"] = kFormatVersion;
  doc["num_stages"] = cfg.num_stages;
  doc["cache_bytes"] = cfg.cache_capacity;
  doc["pairs"] = ojson::array();
  doc["skipped"] = ojson::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (pairs[i]) {
      doc["pairs"].push_back(*pairs[i]);
    } else {
      doc["skipped"].push_back(i);
    }
  }
  write_text_file(cfg.out / "manifest.json", doc.dump(2) + "\n");
  out << "exported " << doc["pairs"].size() << " labeled graphs (" << doc["skipped"].size() << " skipped) to "
      << cfg.out.generic_string() << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig &cfg, std::ostream &out) {
  const auto instances = load_instances(cfg);
  if (cfg.schedule) {
    if (instances.size() != 1) throw UsageError("--schedule needs a single --graph");
    const auto &g = instances.front().graph;
    const auto file = parse_schedule(read_text_file(*cfg.schedule));
    const auto s = load_coarse_schedule(*cfg.schedule, g, file.num_stages);
    SchedulePolicy policy;
    policy.require_nonempty_stages = cfg.require_nonempty_stages;
    const auto report = validate_schedule(g, s, policy);
    for (const auto &v : report.violations) out << "violation: " << v.message << "\n";
    if (!report.ok()) return kExitRuntime;
    out << "schedule ok: objective "
        << vector_json(schedule_metrics(g, s, cfg.cache_capacity).objective_vector()).dump() << "\n";
    return kExitOk;
  }
  for (const auto &inst : instances) {
    out << inst.name << ": ok, " << inst.graph.num_nodes() << " nodes, " << inst.graph.num_edges()
        << " edges, depth " << graph_depth(asap_levels(inst.graph)) << "\n";
  }
  return kExitOk;
}

}  // namespace incsched
