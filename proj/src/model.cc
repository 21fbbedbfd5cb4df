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

#include "incsched/model.h"

#include <algorithm>
#include <sstream>

#include "incsched/error.h"

namespace incsched {
namespace {
constexpr const char *kModule = "ilp-model";

Constraint make(ConstraintClass cls, std::string name, LinearExpr expr, Sense sense) {
  expr.normalize();
  return {cls, std::move(name), std::move(expr), sense};
}

bool holds(std::int64_t value, Sense sense) {
  switch (sense) {
    case Sense::kLe:
      return value <= 0;
    case Sense::kGe:
      return value >= 0;
    case Sense::kEq:
      return value == 0;
  }
  return false;
}

std::string edge_tag(const Edge &e) { return std::to_string(e.src) + "_" + std::to_string(e.dst); }
}  // namespace

LinearExpr &LinearExpr::add(const LinearExpr &other, std::int64_t scale) {
  for (const auto &t : other.terms) terms.push_back({t.var, t.coef * scale});
  constant += other.constant * scale;
  return *this;
}

LinearExpr &LinearExpr::add_term(VarId v, std::int64_t coef) {
  terms.push_back({v, coef});
  return *this;
}

LinearExpr &LinearExpr::normalize() {
  std::stable_sort(terms.begin(), terms.end(), [](const Term &a, const Term &b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const auto &t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term &t) { return t.coef == 0; });
  terms = std::move(merged);
  return *this;
}

std::int64_t LinearExpr::evaluate(const std::vector<std::int64_t> &point) const {
  std::int64_t value = constant;
  for (const auto &t : terms) value += t.coef * point[static_cast<std::size_t>(t.var)];
  return value;
}

const char *constraint_class_name(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::kExactlyOne:
      return "exactly-one";
    case ConstraintClass::kDependence:
      return "dependence";
    case ConstraintClass::kCrossing:
      return "crossing";
    case ConstraintClass::kAnd:
      return "and";
    case ConstraintClass::kMemoryDef:
      return "memory-def";
    case ConstraintClass::kPeak:
      return "peak";
    case ConstraintClass::kOffcache:
      return "offcache";
    case ConstraintClass::kCommDef:
      return "comm-def";
    case ConstraintClass::kCommMax:
      return "comm-max";
    case ConstraintClass::kNonEmpty:
      return "non-empty";
  }
  return "unknown";
}

bool Constraint::satisfied(const std::vector<std::int64_t> &point) const { return holds(expr.evaluate(point), sense); }

std::array<Constraint, 3> and_constraints(const LinearExpr &x, const LinearExpr &y, const LinearExpr &z) {
  return {make(ConstraintClass::kAnd, "and_lo", z - x - y + LinearExpr::value(1), Sense::kGe),
          make(ConstraintClass::kAnd, "and_x", z - x, Sense::kLe),
          make(ConstraintClass::kAnd, "and_y", z - y, Sense::kLe)};
}

std::array<Constraint, 2> crossing_constraints(const LinearExpr &stage_i, const LinearExpr &stage_j,
                                               const LinearExpr &crossing, int num_stages) {
  return {make(ConstraintClass::kCrossing, "cross_lo", stage_j - stage_i - crossing, Sense::kGe),
          make(ConstraintClass::kCrossing, "cross_hi", stage_j - stage_i - (num_stages - 1) * crossing, Sense::kLe)};
}

VarId ScheduleModel::add_var(std::string name, VarKind kind, std::int64_t lb, std::optional<std::int64_t> ub) {
  vars_.push_back({std::move(name), kind, lb, ub});
  return static_cast<VarId>(vars_.size() - 1);
}

void ScheduleModel::add_constraint(Constraint c) {
  c.expr.normalize();
  if (c.expr.is_constant()) {
    if (!holds(c.expr.constant, c.sense)) conflicts_.push_back(std::move(c));
    return;
  }
  constraints_.push_back(std::move(c));
}

std::size_t ScheduleModel::num_binaries() const {
  return static_cast<std::size_t>(
      std::count_if(vars_.begin(), vars_.end(), [](const Variable &v) { return v.kind == VarKind::kBinary; }));
}

std::size_t ScheduleModel::count(ConstraintClass c) const {
  return static_cast<std::size_t>(
      std::count_if(constraints_.begin(), constraints_.end(), [c](const Constraint &k) { return k.cls == c; }));
}

std::map<ConstraintClass, std::size_t> ScheduleModel::census() const {
  std::map<ConstraintClass, std::size_t> out;
  for (const auto &c : constraints_) ++out[c.cls];
  return out;
}

ScheduleModel build_model(const ComputeGraph &g, int num_stages, const StageDomains &domains, Bytes cache_capacity,
                          const SchedulePolicy &policy) {
  if (num_stages < 1) throw Error(kModule, "K must be >= 1");
  if (domains.num_stages() != num_stages || domains.size() != g.num_nodes()) {
    throw Error(kModule, "domains do not match graph and K");
  }
  ScheduleModel m;
  m.graph_ = g;
  m.num_stages_ = num_stages;
  m.domains_ = domains;
  m.cache_capacity_ = cache_capacity;
  m.policy_ = policy;
  const int K = num_stages;
  const std::size_t n = g.num_nodes();

  // Assignment binaries s_v^k; singleton domains become constants.
  m.assign_.assign(n, std::vector<LinearExpr>(static_cast<std::size_t>(K), LinearExpr::value(0)));
  m.stage_.assign(n, LinearExpr::value(0));
  for (std::size_t v = 0; v < n; ++v) {
    const auto id = static_cast<NodeId>(v);
    if (domains.is_singleton(id)) {
      const Stage k = domains.min_stage(id);
      m.assign_[v][k] = LinearExpr::value(1);
      m.stage_[v] = LinearExpr::value(k);
      continue;
    }
    LinearExpr one_hot;
    for (Stage k = 0; k < K; ++k) {
      if (!domains.contains(id, k)) continue;
      VarId x = m.add_var("x_" + std::to_string(v) + "_" + std::to_string(k), VarKind::kBinary, 0, 1);
      m.assign_[v][k] = LinearExpr::var(x);
      m.stage_[v].add_term(x, k);
      one_hot.add_term(x, 1);
    }
    one_hot.constant = -1;
    m.add_constraint(make(ConstraintClass::kExactlyOne, "one_" + std::to_string(v), one_hot, Sense::kEq));
  }

  for (const auto &e : g.edges()) {
    m.add_constraint(make(ConstraintClass::kDependence, "dep_" + edge_tag(e), m.stage_[e.src] - m.stage_[e.dst],
                          Sense::kLe));
  }

  // Crossing indicators b_e and per-stage crossings a[e][k] = x[src][k] AND b_e.
  m.crossing_.reserve(g.num_edges());
  m.cross_at_.assign(g.num_edges(), {});
  m.cross_own_.assign(g.num_edges(), {});
  for (std::size_t ei = 0; ei < g.num_edges(); ++ei) {
    const auto &e = g.edges()[ei];
    const auto &si = m.stage_[e.src];
    const auto &sj = m.stage_[e.dst];
    LinearExpr b;
    if (si.is_constant() && sj.is_constant()) {
      b = LinearExpr::value(si.constant < sj.constant ? 1 : 0);
    } else {
      b = LinearExpr::var(m.add_var("b_" + edge_tag(e), VarKind::kBinary, 0, 1));
      for (auto &c : crossing_constraints(si, sj, b, K)) {
        c.name += "_" + edge_tag(e);
        m.add_constraint(std::move(c));
      }
    }
    m.crossing_.push_back(b);
    for (Stage k = 0; k + 1 < K; ++k) {
      const auto &x = m.assign_[e.src][k];
      LinearExpr a;
      bool own = false;
      if ((x.is_constant() && x.constant == 0) || (b.is_constant() && b.constant == 0)) {
        a = LinearExpr::value(0);
      } else if (x.is_constant() && b.is_constant()) {
        a = LinearExpr::value(1);
      } else if (x.is_constant()) {
        a = b;
      } else if (b.is_constant()) {
        a = x;
      } else {
        a = LinearExpr::var(m.add_var("a_" + edge_tag(e) + "_" + std::to_string(k), VarKind::kBinary, 0, 1));
        own = true;
        for (auto &c : and_constraints(x, b, a)) {
          c.name += "_" + edge_tag(e) + "_" + std::to_string(k);
          m.add_constraint(std::move(c));
        }
      }
      m.cross_at_[ei].push_back(std::move(a));
      m.cross_own_[ei].push_back(own);
    }
  }

  m.peak_ = m.add_var("m_peak", VarKind::kInteger, 0, std::nullopt);
  LinearExpr offcache_total;
  for (Stage k = 0; k < K; ++k) {
    const std::string ks = std::to_string(k);
    VarId mk = m.add_var("m_" + ks, VarKind::kInteger, 0, std::nullopt);
    VarId ok = m.add_var("o_" + ks, VarKind::kInteger, 0, std::nullopt);
    m.mem_.push_back(mk);
    m.offcache_.push_back(ok);
    LinearExpr def = LinearExpr::var(mk);
    for (std::size_t v = 0; v < n; ++v) def.add(m.assign_[v][k], -g.nodes()[v].param_bytes);
    m.add_constraint(make(ConstraintClass::kMemoryDef, "mem_" + ks, def, Sense::kEq));
    m.add_constraint(make(ConstraintClass::kPeak, "peak_" + ks, LinearExpr::var(mk) - LinearExpr::var(m.peak_),
                          Sense::kLe));
    m.add_constraint(make(ConstraintClass::kOffcache, "off_" + ks,
                          LinearExpr::var(ok) - LinearExpr::var(mk) + LinearExpr::value(cache_capacity), Sense::kGe));
    offcache_total.add_term(ok, 1);
  }

  m.comm_max_ = m.add_var("com_max", VarKind::kInteger, 0, std::nullopt);
  for (Stage k = 0; k + 1 < K; ++k) {
    const std::string ks = std::to_string(k);
    VarId ck = m.add_var("c_" + ks, VarKind::kInteger, 0, std::nullopt);
    m.comm_.push_back(ck);
    LinearExpr def = LinearExpr::var(ck);
    for (std::size_t ei = 0; ei < g.num_edges(); ++ei) {
      def.add(m.cross_at_[ei][k], -g.tensor_bytes(g.edges()[ei]));
    }
    m.add_constraint(make(ConstraintClass::kCommDef, "comm_" + ks, def, Sense::kEq));
    m.add_constraint(make(ConstraintClass::kCommMax, "commmax_" + ks,
                          LinearExpr::var(ck) - LinearExpr::var(m.comm_max_), Sense::kLe));
  }

  if (policy.require_nonempty_stages) {
    for (Stage k = 0; k < K; ++k) {
      LinearExpr used = LinearExpr::value(-1);
      for (std::size_t v = 0; v < n; ++v) used.add(m.assign_[v][k]);
      m.add_constraint(make(ConstraintClass::kNonEmpty, "nonempty_" + std::to_string(k), used, Sense::kGe));
    }
  }

  m.objectives_ = {LinearExpr::var(m.peak_), offcache_total, LinearExpr::var(m.comm_max_)};
  return m;
}

std::vector<std::int64_t> ScheduleModel::encode(const Schedule &s) const {
  if (!domains_.admits(s)) throw Error(kModule, "schedule lies outside the model domains");
  std::vector<std::int64_t> point(vars_.size(), 0);
  auto set = [&point](const LinearExpr &e, std::int64_t value) {
    if (!e.is_constant()) point[static_cast<std::size_t>(e.terms.front().var)] = value;
  };
  const std::size_t n = graph_.num_nodes();
  for (std::size_t v = 0; v < n; ++v) set(assign_[v][s.stage[v]], 1);
  for (std::size_t ei = 0; ei < graph_.num_edges(); ++ei) {
    const auto &e = graph_.edges()[ei];
    const bool crosses = s.stage[e.src] < s.stage[e.dst];
    set(crossing_[ei], crosses ? 1 : 0);
    for (Stage k = 0; k + 1 < num_stages_; ++k) {
      // Aliased entries share x's or b's variable, already set above.
      if (cross_own_[ei][k]) set(cross_at_[ei][k], (crosses && s.stage[e.src] == k) ? 1 : 0);
    }
  }
  std::int64_t peak = 0;
  for (Stage k = 0; k < num_stages_; ++k) {
    std::int64_t mem = 0;
    for (std::size_t v = 0; v < n; ++v) mem += graph_.nodes()[v].param_bytes * assign_[v][k].evaluate(point);
    point[mem_[k]] = mem;
    point[offcache_[k]] = std::max<std::int64_t>(0, mem - cache_capacity_);
    peak = std::max(peak, mem);
  }
  point[peak_] = peak;
  std::int64_t comm_max = 0;
  for (Stage k = 0; k + 1 < num_stages_; ++k) {
    std::int64_t c = 0;
    for (std::size_t ei = 0; ei < graph_.num_edges(); ++ei) {
      c += graph_.tensor_bytes(graph_.edges()[ei]) * cross_at_[ei][k].evaluate(point);
    }
    point[comm_[k]] = c;
    comm_max = std::max(comm_max, c);
  }
  point[comm_max_] = comm_max;
  return point;
}

Schedule ScheduleModel::decode(const std::vector<std::int64_t> &point) const {
  Schedule s{num_stages_, std::vector<Stage>(graph_.num_nodes(), 0)};
  for (std::size_t v = 0; v < s.stage.size(); ++v) s.stage[v] = static_cast<Stage>(stage_[v].evaluate(point));
  return s;
}

bool ScheduleModel::feasible(const std::vector<std::int64_t> &point, std::string *why) const {
  auto fail = [why](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (point.size() != vars_.size()) return fail("point has wrong dimension");
  if (!conflicts_.empty()) return fail(std::string("constant conflict in ") + constraint_class_name(conflicts_[0].cls));
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto &var = vars_[i];
    if (point[i] < var.lb || (var.ub && point[i] > *var.ub)) return fail("bound violated on " + var.name);
  }
  for (const auto &c : constraints_) {
    if (!c.satisfied(point)) return fail(std::string(constraint_class_name(c.cls)) + " violated: " + c.name);
  }
  return true;
}

ObjectiveVector ScheduleModel::objective(const std::vector<std::int64_t> &point) const {
  return {objectives_[0].evaluate(point), objectives_[1].evaluate(point), objectives_[2].evaluate(point)};
}

std::string to_lp(const ScheduleModel &m, ObjectiveOrder order) {
  const auto &vars = m.variables();
  auto write_expr = [&vars](std::ostream &os, const LinearExpr &e) {
    if (e.terms.empty()) {
      os << " 0 " << vars.front().name;
      return;
    }
    bool first = true;
    for (const auto &t : e.terms) {
      if (t.coef < 0) {
        os << " - ";
      } else if (!first) {
        os << " + ";
      } else {
        os << " ";
      }
      const auto mag = t.coef < 0 ? -t.coef : t.coef;
      if (mag != 1) os << mag << " ";
      os << vars[static_cast<std::size_t>(t.var)].name;
      first = false;
    }
  };
  std::ostringstream os;
  os << "\\ incsched schedule model, format_version 1\n";
  const char *names[3] = {"peak", "offcache", "comm"};
  std::array<int, 3> rank = {0, 1, 2};
  if (order == ObjectiveOrder::kPeakCommOffcache) rank = {0, 2, 1};
  for (int i = 0; i < 3; ++i) os << "\\ lex-priority " << (i + 1) << ": " << names[rank[i]] << "\n";
  os << "Minimize multi-objectives\n";
  for (int i = 0; i < 3; ++i) {
    os << " " << names[rank[i]] << ": Priority=" << (3 - i);
    write_expr(os, m.objectives()[rank[i]]);
    os << "\n";
  }
  os << "Subject To\n";
  for (const auto &c : m.constraints()) {
    os << " " << c.name << ":";
    write_expr(os, c.expr);
    os << (c.sense == Sense::kLe ? " <= " : c.sense == Sense::kGe ? " >= " : " = ") << -c.expr.constant << "\n";
  }
  os << "Bounds\n";
  for (const auto &v : vars) {
    if (v.kind == VarKind::kBinary) continue;
    os << " " << v.lb << " <= " << v.name << (v.ub ? " <= " + std::to_string(*v.ub) : std::string(" <= +inf")) << "\n";
  }
  os << "Binaries\n";
  for (const auto &v : vars) {
    if (v.kind == VarKind::kBinary) os << " " << v.name << "\n";
  }
  os << "Generals\n";
  for (const auto &v : vars) {
    if (v.kind == VarKind::kInteger) os << " " << v.name << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace incsched
