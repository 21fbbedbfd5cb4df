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

#include "incsched/solver.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <limits>

#include "incsched/error.h"
#include "json.hpp"

namespace incsched {
namespace {
constexpr const char *kModule = "exact-solver";
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a <= 0 ? 0 : (a + b - 1) / b; }

std::array<int, 3> objective_rank(ObjectiveOrder order) {
  return order == ObjectiveOrder::kPeakCommOffcache ? std::array<int, 3>{0, 2, 1} : std::array<int, 3>{0, 1, 2};
}

std::int64_t component(const ObjectiveVector &v, int index) {
  return index == 0 ? v.peak_mem : index == 1 ? v.total_offcache : v.max_comm;
}

// Depth-first branch-and-bound over the free nodes of a model.
//
// State is updated incrementally and undone through a trail. Besides per-stage
// memory and communication, every unassigned free node sits in a bucket keyed
// by its current stage interval [lb, ub]; the bounds below read those buckets:
//   peak     >= (mem[t..u] + mass confined to [t, u]) / (u - t + 1)   for all t <= u
//   offcache >= sum hinge(mem) + max(0, remaining mass - cache slack it can reach)
//   comm     >= max over stages of crossings already decided
// An edge is charged to its source stage as soon as the crossing is certain,
// i.e. when the consumer's lower bound passes the producer's stage.
class Search {
 public:
  Search(const ScheduleModel &model, const SolveOptions &options);
  SolveReport run();

 private:
  void set(std::int64_t *slot, std::int64_t value) {
    trail_.emplace_back(slot, *slot);
    *slot = value;
  }
  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      *trail_.back().first = trail_.back().second;
      trail_.pop_back();
    }
  }
  std::int64_t *bucket_mass(std::int64_t lb, std::int64_t ub) { return &bucket_mass_[lb * K_ + ub]; }
  std::int64_t *bucket_count(std::int64_t lb, std::int64_t ub) { return &bucket_count_[lb * K_ + ub]; }

  void init_state();
  void assign(NodeId v, Stage k);
  bool prune();
  bool fillable() const;
  std::int64_t peak_bound() const;
  std::int64_t offcache_bound() const;
  std::int64_t comm_bound() const;
  void leaf();
  void dfs(std::size_t depth);
  ObjectiveVector evaluate_fixed(const std::vector<Stage> &stages) const;

  const ScheduleModel &model_;
  const ComputeGraph &g_;
  const SolveOptions &options_;
  const int K_;
  const std::size_t n_;
  const Bytes cache_;
  const bool nonempty_;

  std::vector<char> free_;
  std::vector<NodeId> order_;
  std::vector<std::int64_t> lb0_, ub0_;
  std::vector<Stage> preferred_;

  std::vector<std::int64_t> stage_, mem_, used_, comm_, lbeff_, bucket_mass_, bucket_count_;
  std::int64_t remaining_mass_ = 0;
  std::int64_t remaining_count_ = 0;
  std::vector<std::pair<std::int64_t *, std::int64_t>> trail_;

  std::array<int, 3> rank_;
  int objective_ = 0;
  std::array<std::int64_t, 3> caps_{kInf, kInf, kInf};
  std::int64_t best_value_ = kInf;
  bool have_best_ = false;
  std::vector<Stage> best_stage_;
  ObjectiveVector best_vec_;

  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
  Clock::time_point start_;
  Clock::time_point deadline_;
};

Search::Search(const ScheduleModel &model, const SolveOptions &options)
    : model_(model),
      g_(model.graph()),
      options_(options),
      K_(model.num_stages()),
      n_(model.graph().num_nodes()),
      cache_(model.cache_capacity()),
      nonempty_(model.policy().require_nonempty_stages),
      rank_(objective_rank(options.order)) {}

void Search::init_state() {
  const auto &dom = model_.domains();
  free_.assign(n_, 0);
  stage_.assign(n_, kUnassigned);
  for (std::size_t v = 0; v < n_; ++v) {
    const auto id = static_cast<NodeId>(v);
    if (dom.is_singleton(id)) {
      stage_[v] = dom.min_stage(id);
    } else {
      free_[v] = 1;
    }
  }

  // Static stage intervals from domains plus dependence propagation.
  lb0_.assign(n_, 0);
  ub0_.assign(n_, 0);
  for (NodeId v : g_.topo_order()) {
    lb0_[v] = dom.min_stage(v);
    for (NodeId u : g_.preds(v)) lb0_[v] = std::max(lb0_[v], lb0_[u]);
  }
  const auto &topo = g_.topo_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    NodeId v = *it;
    ub0_[v] = dom.max_stage(v);
    for (NodeId w : g_.succs(v)) ub0_[v] = std::min(ub0_[v], ub0_[w]);
  }
  for (std::size_t v = 0; v < n_; ++v) {
    bool any = false;
    for (auto k = lb0_[v]; k <= ub0_[v]; ++k) any = any || dom.contains(static_cast<NodeId>(v), static_cast<Stage>(k));
    if (!any) {
      throw Error(kModule, "infeasible model: dependence constraints leave node " + g_.node(static_cast<NodeId>(v)).name +
                               " without an admissible stage");
    }
  }

  const auto levels = asap_levels(g_);
  for (NodeId v : asap_order(g_, levels)) {
    if (free_[v]) order_.push_back(v);
  }

  preferred_.assign(n_, kUnassigned);
  if (options_.warm_start && dom.admits(*options_.warm_start)) preferred_ = options_.warm_start->stage;

  mem_.assign(static_cast<std::size_t>(K_), 0);
  used_.assign(static_cast<std::size_t>(K_), 0);
  comm_.assign(static_cast<std::size_t>(K_), 0);
  lbeff_.assign(n_, 0);
  bucket_mass_.assign(static_cast<std::size_t>(K_ * K_), 0);
  bucket_count_.assign(static_cast<std::size_t>(K_ * K_), 0);
  for (std::size_t v = 0; v < n_; ++v) {
    const Bytes p = g_.nodes()[v].param_bytes;
    if (free_[v]) {
      lbeff_[v] = lb0_[v];
      *bucket_mass(lb0_[v], ub0_[v]) += p;
      *bucket_count(lb0_[v], ub0_[v]) += 1;
      remaining_mass_ += p;
      remaining_count_ += 1;
    } else {
      mem_[stage_[v]] += p;
      used_[stage_[v]] += 1;
    }
  }
  for (const auto &e : g_.edges()) {
    if (free_[e.src]) continue;
    const auto su = stage_[e.src];
    const auto dst_lb = free_[e.dst] ? lb0_[e.dst] : stage_[e.dst];
    if (su < dst_lb) comm_[su] += g_.tensor_bytes(e);
  }
}

void Search::assign(NodeId v, Stage k) {
  const Bytes p = g_.node(v).param_bytes;
  const auto lbv = lbeff_[v];
  set(&stage_[v], k);
  set(bucket_mass(lbv, ub0_[v]), *bucket_mass(lbv, ub0_[v]) - p);
  set(bucket_count(lbv, ub0_[v]), *bucket_count(lbv, ub0_[v]) - 1);
  set(&remaining_mass_, remaining_mass_ - p);
  set(&remaining_count_, remaining_count_ - 1);
  set(&mem_[k], mem_[k] + p);
  set(&used_[k], used_[k] + 1);

  // In-edges: everything below lbv was charged already.
  for (NodeId u : g_.preds(v)) {
    const auto su = stage_[u];
    if (su >= lbv && su < k) set(&comm_[su], comm_[su] + g_.node(u).out_bytes);
  }
  const Bytes out = g_.node(v).out_bytes;
  for (NodeId w : g_.succs(v)) {
    if (!free_[w]) {
      if (k < stage_[w]) set(&comm_[k], comm_[k] + out);
      continue;
    }
    const auto old_lb = lbeff_[w];
    if (k < old_lb) {
      set(&comm_[k], comm_[k] + out);
    } else if (k > old_lb) {
      // Raising w's lower bound makes crossings from lower assigned producers certain.
      for (NodeId u : g_.preds(w)) {
        const auto su = stage_[u];
        if (u != v && su != kUnassigned && su >= old_lb && su < k) set(&comm_[su], comm_[su] + g_.node(u).out_bytes);
      }
      const Bytes pw = g_.node(w).param_bytes;
      set(bucket_mass(old_lb, ub0_[w]), *bucket_mass(old_lb, ub0_[w]) - pw);
      set(bucket_count(old_lb, ub0_[w]), *bucket_count(old_lb, ub0_[w]) - 1);
      set(bucket_mass(k, ub0_[w]), *bucket_mass(k, ub0_[w]) + pw);
      set(bucket_count(k, ub0_[w]), *bucket_count(k, ub0_[w]) + 1);
      set(&lbeff_[w], k);
    }
  }
}

bool Search::fillable() const {
  std::int64_t empties = 0;
  for (int k = 0; k < K_; ++k) empties += used_[k] == 0;
  if (empties == 0) return true;
  if (empties > remaining_count_) return false;
  // Empty stages in [0, u] need distinct nodes with lb <= u; [t, K-1] need ub >= t.
  std::int64_t empties_seen = 0;
  std::int64_t lb_le = 0;
  for (int u = 0; u < K_; ++u) {
    for (int b = u; b < K_; ++b) lb_le += bucket_count_[u * K_ + b];
    empties_seen += used_[u] == 0;
    if (empties_seen > lb_le) return false;
  }
  empties_seen = 0;
  std::int64_t ub_ge = 0;
  for (int t = K_ - 1; t >= 0; --t) {
    for (int a = 0; a <= t; ++a) ub_ge += bucket_count_[a * K_ + t];
    empties_seen += used_[t] == 0;
    if (empties_seen > ub_ge) return false;
  }
  return true;
}

std::int64_t Search::peak_bound() const {
  std::int64_t bound = *std::max_element(mem_.begin(), mem_.end());
  if (remaining_mass_ == 0) return bound;
  // confined[u] accumulates mass with lb >= t and ub <= u while t walks down.
  std::array<std::int64_t, kMaxStages> confined{};
  for (int t = K_ - 1; t >= 0; --t) {
    std::int64_t row = 0;
    std::int64_t mem_span = 0;
    for (int u = t; u < K_; ++u) {
      row += bucket_mass_[t * K_ + u];
      confined[u] += row;
      mem_span += mem_[u];
      bound = std::max(bound, ceil_div(mem_span + confined[u], u - t + 1));
    }
  }
  return bound;
}

std::int64_t Search::offcache_bound() const {
  std::int64_t base = 0;
  for (int k = 0; k < K_; ++k) base += std::max<std::int64_t>(0, mem_[k] - cache_);
  if (remaining_mass_ == 0) return base;
  int lo = K_;
  int hi = -1;
  for (int a = 0; a < K_; ++a) {
    for (int b = a; b < K_; ++b) {
      if (bucket_count_[a * K_ + b] > 0) {
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
    }
  }
  std::int64_t slack = 0;
  for (int k = lo; k <= hi; ++k) slack += std::max<std::int64_t>(0, cache_ - mem_[k]);
  return base + std::max<std::int64_t>(0, remaining_mass_ - slack);
}

std::int64_t Search::comm_bound() const {
  std::int64_t bound = 0;
  for (int k = 0; k + 1 < K_; ++k) bound = std::max(bound, comm_[k]);
  return bound;
}

bool Search::prune() {
  if (nonempty_ && !fillable()) return true;
  for (int j = 0; j < 3; ++j) {
    const bool minimizing = j == objective_;
    if (!minimizing && caps_[j] == kInf) continue;
    const std::int64_t bound = j == 0 ? peak_bound() : j == 1 ? offcache_bound() : comm_bound();
    if (minimizing && bound >= best_value_) return true;
    if (!minimizing && bound > caps_[j]) return true;
  }
  return false;
}

void Search::leaf() {
  if (nonempty_ && std::find(used_.begin(), used_.end(), 0) != used_.end()) return;
  ObjectiveVector vec;
  for (int k = 0; k < K_; ++k) {
    vec.peak_mem = std::max(vec.peak_mem, mem_[k]);
    vec.total_offcache += std::max<std::int64_t>(0, mem_[k] - cache_);
  }
  vec.max_comm = comm_bound();
  for (int j = 0; j < 3; ++j) {
    if (j != objective_ && component(vec, j) > caps_[j]) return;
  }
  const auto value = component(vec, objective_);
  if (value >= best_value_) return;
  best_value_ = value;
  best_vec_ = vec;
  best_stage_.assign(stage_.begin(), stage_.end());
  have_best_ = true;
}

void Search::dfs(std::size_t depth) {
  if (depth == order_.size()) {
    leaf();
    return;
  }
  const NodeId v = order_[depth];
  const auto lo = static_cast<Stage>(lbeff_[v]);
  const auto hi = static_cast<Stage>(ub0_[v]);
  const auto &dom = model_.domains();
  const Stage first = preferred_[v];
  auto visit = [&](Stage k) {
    const auto mark = trail_.size();
    assign(v, k);
    ++nodes_;
    if ((nodes_ & 1023U) == 0 && options_.time_limit_s > 0 && Clock::now() >= deadline_) timed_out_ = true;
    if (!timed_out_ && !prune()) dfs(depth + 1);
    undo(mark);
  };
  if (first >= lo && first <= hi && dom.contains(v, first)) visit(first);
  for (Stage k = lo; k <= hi && !timed_out_; ++k) {
    if (k != first && dom.contains(v, k)) visit(k);
  }
}

ObjectiveVector Search::evaluate_fixed(const std::vector<Stage> &stages) const {
  Schedule s{K_, stages};
  return schedule_metrics(g_, s, cache_).objective_vector();
}

SolveReport Search::run() {
  start_ = Clock::now();
  deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(
                           options_.time_limit_s > 0 ? options_.time_limit_s : 0.0));
  if (!model_.conflicts().empty()) {
    throw Error(kModule, std::string("infeasible model: ") + constraint_class_name(model_.conflicts().front().cls) +
                             " constraint violated by fixed nodes");
  }
  init_state();

  if (options_.warm_start && model_.domains().admits(*options_.warm_start) &&
      validate_schedule(g_, *options_.warm_start, model_.policy()).ok()) {
    best_stage_ = options_.warm_start->stage;
    best_vec_ = evaluate_fixed(best_stage_);
    have_best_ = true;
  }

  for (int tier = 0; tier < 3 && !timed_out_; ++tier) {
    objective_ = rank_[tier];
    best_value_ = have_best_ ? component(best_vec_, objective_) : kInf;
    if (order_.empty() || !nonempty_ || fillable()) {
      if (order_.empty()) {
        leaf();
      } else if (!prune() || !have_best_) {
        dfs(0);
      }
    }
    if (!have_best_) {
      if (timed_out_) break;
      throw Error(kModule, "infeasible model: no assignment satisfies the dependence and non-empty constraints");
    }
    if (!timed_out_) caps_[objective_] = component(best_vec_, objective_);
  }
  if (!have_best_) throw Error(kModule, "time limit exceeded before any feasible schedule was found");

  SolveReport report;
  report.schedule = Schedule{K_, best_stage_};
  report.objective = best_vec_;
  report.proved_optimal = !timed_out_;
  report.nodes_expanded = nodes_;
  report.wall_time_s = seconds_since(start_);
  report.free_nodes = order_.size();
  report.total_nodes = n_;
  return report;
}
}  // namespace

SolveReport solve_lex(const ScheduleModel &model, const SolveOptions &options) {
  Search search(model, options);
  return search.run();
}

SolveReport brute_force(const ComputeGraph &g, int num_stages, const StageDomains &domains, Bytes cache_capacity,
                        const SchedulePolicy &policy, ObjectiveOrder order) {
  const auto start = Clock::now();
  if (domains.num_stages() != num_stages || domains.size() != g.num_nodes()) {
    throw Error(kModule, "domains do not match graph and K");
  }
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<Stage>> choices(n);
  std::uint64_t space = 1;
  for (std::size_t v = 0; v < n; ++v) {
    choices[v] = domains.stages(static_cast<NodeId>(v));
    space *= choices[v].size();
    if (space > kBruteForceGuard) {
      throw Error(kModule, "search-space guard exceeded: domain product above " + std::to_string(kBruteForceGuard));
    }
  }

  std::vector<std::size_t> idx(n, 0);
  Schedule s{num_stages, std::vector<Stage>(n)};
  for (std::size_t v = 0; v < n; ++v) s.stage[v] = choices[v][0];
  std::vector<int> used(static_cast<std::size_t>(num_stages));
  bool found = false;
  Schedule best_s;
  ObjectiveVector best;
  std::uint64_t visited = 0;
  // Odometer with node 0 most significant: lexicographic order of assignment vectors.
  while (true) {
    ++visited;
    bool ok = std::all_of(g.edges().begin(), g.edges().end(),
                          [&](const Edge &e) { return s.stage[e.src] <= s.stage[e.dst]; });
    if (ok && policy.require_nonempty_stages) {
      std::fill(used.begin(), used.end(), 0);
      for (Stage st : s.stage) used[static_cast<std::size_t>(st)] = 1;
      ok = std::find(used.begin(), used.end(), 0) == used.end();
    }
    if (ok) {
      const auto obj = schedule_metrics(g, s, cache_capacity).objective_vector();
      if (!found || lex_less(obj, best, order)) {
        best = obj;
        best_s = s;
        found = true;
      }
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < choices[i].size()) {
        s.stage[i] = choices[i][idx[i]];
        break;
      }
      idx[i] = 0;
      s.stage[i] = choices[i][0];
      if (i == 0) {
        i = n + 1;
        break;
      }
    }
    if (i == n + 1 || n == 0) break;
  }
  if (!found) throw Error(kModule, "no valid assignment");

  SolveReport report;
  report.schedule = best_s;
  report.objective = best;
  report.proved_optimal = true;
  report.nodes_expanded = visited;
  report.wall_time_s = seconds_since(start);
  report.total_nodes = n;
  for (std::size_t v = 0; v < n; ++v) report.free_nodes += choices[v].size() > 1;
  return report;
}

std::string objective_json(const ObjectiveVector &v) {
  nlohmann::ordered_json j = {
      {"peak_mem", v.peak_mem}, {"total_offcache", v.total_offcache}, {"max_comm", v.max_comm}};
  return j.dump();
}

std::string report_json(const SolveReport &r) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["producer"] = r.producer;
  j["gamma"] = r.gamma ? nlohmann::ordered_json(*r.gamma) : nlohmann::ordered_json(nullptr);
  j["objective"] = nlohmann::ordered_json::parse(objective_json(r.objective));
  j["objective_vector"] = {r.objective.peak_mem, r.objective.total_offcache, r.objective.max_comm};
  j["coarse_objective"] = r.coarse_objective ? nlohmann::ordered_json::parse(objective_json(*r.coarse_objective))
                                             : nlohmann::ordered_json(nullptr);
  j["proved_optimal"] = r.proved_optimal;
  j["nodes_expanded"] = r.nodes_expanded;
  j["free_nodes"] = r.free_nodes;
  j["total_nodes"] = r.total_nodes;
  j["num_stages"] = r.schedule.num_stages;
  j["wall_time_s"] = r.wall_time_s;
  return j.dump(2) + "\n";
}

}  // namespace incsched
