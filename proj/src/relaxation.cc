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

#include "incsched/relaxation.h"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

#include "incsched/error.h"
#include "json.hpp"

namespace incsched {
namespace {
constexpr const char *kModule = "relaxation";

void require_valid(const ComputeGraph &g, const Schedule &s) {
  auto report = validate_schedule(g, s, SchedulePolicy{false});
  if (!report.ok()) throw Error(kModule, "invalid schedule: " + report.violations.front().message);
}

std::uint64_t full_mask(int num_stages) {
  return num_stages >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << num_stages) - 1);
}
}  // namespace

std::vector<Edge> boundary_edges(const ComputeGraph &g, const Schedule &s) {
  require_valid(g, s);
  std::vector<Edge> out;
  for (const auto &e : g.edges()) {
    if (s.stage[e.src] < s.stage[e.dst]) out.push_back(e);
  }
  return out;
}

RelaxWindow relax_window(const ComputeGraph &g, const Schedule &s, int gamma) {
  if (gamma < 0) throw Error(kModule, "gamma must be >= 0");
  const auto cuts = boundary_edges(g, s);
  const auto levels = asap_levels(g);
  RelaxWindow w;
  w.gamma = gamma;
  if (!cuts.empty()) {
    int earliest_src = std::numeric_limits<int>::max();
    int latest_dst = 0;
    for (const auto &e : cuts) {
      earliest_src = std::min(earliest_src, levels[e.src]);
      latest_dst = std::max(latest_dst, levels[e.dst]);
    }
    const int depth = graph_depth(levels);
    w.empty = false;
    w.lo_level = std::max(0, earliest_src - gamma);
    w.hi_level = static_cast<int>(std::min<long long>(depth, static_cast<long long>(latest_dst) + gamma));
  }
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const bool free = !w.empty && levels[v] >= w.lo_level && levels[v] <= w.hi_level;
    (free ? w.free_nodes : w.frozen_nodes).push_back(static_cast<NodeId>(v));
  }
  return w;
}

StageDomains::StageDomains(int num_stages, std::vector<std::uint64_t> masks)
    : num_stages_(num_stages), masks_(std::move(masks)) {
  if (num_stages < 1 || num_stages > kMaxStages) {
    throw Error(kModule, "num_stages must be in [1, " + std::to_string(kMaxStages) + "]");
  }
  const auto allowed = full_mask(num_stages);
  for (std::size_t v = 0; v < masks_.size(); ++v) {
    masks_[v] &= allowed;
    if (masks_[v] == 0) throw Error(kModule, "empty domain for node " + std::to_string(v));
  }
}

StageDomains StageDomains::full(std::size_t num_nodes, int num_stages) {
  return StageDomains(num_stages, std::vector<std::uint64_t>(num_nodes, full_mask(num_stages)));
}

StageDomains StageDomains::fixed(const Schedule &s) {
  std::vector<std::uint64_t> masks(s.stage.size());
  for (std::size_t v = 0; v < masks.size(); ++v) {
    if (s.stage[v] < 0 || s.stage[v] >= s.num_stages) throw Error(kModule, "stage out of range");
    masks[v] = std::uint64_t{1} << s.stage[v];
  }
  return StageDomains(s.num_stages, std::move(masks));
}

bool StageDomains::is_singleton(NodeId v) const { return std::has_single_bit(mask(v)); }
int StageDomains::count(NodeId v) const { return std::popcount(mask(v)); }
Stage StageDomains::min_stage(NodeId v) const { return std::countr_zero(mask(v)); }
Stage StageDomains::max_stage(NodeId v) const { return 63 - std::countl_zero(mask(v)); }

std::vector<Stage> StageDomains::stages(NodeId v) const {
  std::vector<Stage> out;
  for (Stage k = 0; k < num_stages_; ++k) {
    if (contains(v, k)) out.push_back(k);
  }
  return out;
}

bool StageDomains::admits(const Schedule &s) const {
  if (s.num_stages != num_stages_ || s.stage.size() != masks_.size()) return false;
  for (std::size_t v = 0; v < masks_.size(); ++v) {
    if (!contains(static_cast<NodeId>(v), s.stage[v])) return false;
  }
  return true;
}

StageDomains build_domains(const ComputeGraph &g, const Schedule &s, const RelaxWindow &w, int num_stages) {
  require_valid(g, s);
  if (s.num_stages != num_stages) throw Error(kModule, "coarse schedule stage count differs from K");
  std::vector<std::uint64_t> masks(g.num_nodes());
  for (std::size_t v = 0; v < masks.size(); ++v) masks[v] = std::uint64_t{1} << s.stage[v];
  for (NodeId v : w.free_nodes) masks[static_cast<std::size_t>(v)] = full_mask(num_stages);
  return StageDomains(num_stages, std::move(masks));
}

std::string domains_json(const ComputeGraph &g, const RelaxWindow &w, const StageDomains &d) {
  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["window"] = {{"empty", w.empty},
                   {"lo_level", w.lo_level},
                   {"hi_level", w.hi_level},
                   {"gamma", w.gamma},
                   {"free_nodes", w.free_nodes},
                   {"frozen_nodes", w.frozen_nodes}};
  auto &domains = doc["domains"];
  domains = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < d.size(); ++v) {
    domains.push_back({{"id", v}, {"name", g.node(static_cast<NodeId>(v)).name}, {"stages", d.stages(static_cast<NodeId>(v))}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace incsched
