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

#ifndef INCSCHED_MODEL_H_
#define INCSCHED_MODEL_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "incsched/graph.h"
#include "incsched/relaxation.h"

namespace incsched {

using VarId = int;

enum class VarKind { kBinary, kInteger };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kBinary;
  std::int64_t lb = 0;
  std::optional<std::int64_t> ub;  // none = unbounded above
};

struct Term {
  VarId var;
  std::int64_t coef;
};

// Integer affine expression sum(coef * var) + constant.
struct LinearExpr {
  std::vector<Term> terms;
  std::int64_t constant = 0;

  static LinearExpr var(VarId v, std::int64_t coef = 1) { return {{{v, coef}}, 0}; }
  static LinearExpr value(std::int64_t c) { return {{}, c}; }

  bool is_constant() const { return terms.empty(); }
  LinearExpr &add(const LinearExpr &other, std::int64_t scale = 1);
  LinearExpr &add_term(VarId v, std::int64_t coef);
  // Merges duplicate variables and drops zero coefficients.
  LinearExpr &normalize();
  std::int64_t evaluate(const std::vector<std::int64_t> &point) const;
};

inline LinearExpr operator+(LinearExpr a, const LinearExpr &b) { return a.add(b); }
inline LinearExpr operator-(LinearExpr a, const LinearExpr &b) { return a.add(b, -1); }
inline LinearExpr operator*(std::int64_t s, LinearExpr a) {
  for (auto &t : a.terms) t.coef *= s;
  a.constant *= s;
  return a;
}

enum class Sense { kLe, kGe, kEq };

enum class ConstraintClass {
  kExactlyOne,
  kDependence,
  kCrossing,
  kAnd,
  kMemoryDef,
  kPeak,
  kOffcache,
  kCommDef,
  kCommMax,
  kNonEmpty,
};

const char *constraint_class_name(ConstraintClass c);

// expr (<=|>=|==) 0
struct Constraint {
  ConstraintClass cls;
  std::string name;
  LinearExpr expr;
  Sense sense;

  bool satisfied(const std::vector<std::int64_t> &point) const;
};

// z = x AND y for binary x, y, z.
std::array<Constraint, 3> and_constraints(const LinearExpr &x, const LinearExpr &y, const LinearExpr &z);

// b = [S_i < S_j] for integral stages in [0, K-1].
std::array<Constraint, 2> crossing_constraints(const LinearExpr &stage_i, const LinearExpr &stage_j,
                                               const LinearExpr &crossing, int num_stages);

// The integer program over (graph, K, domains, cache). Variables for nodes with
// a singleton domain are substituted by constants, so frozen regions add no
// search variables. The instance data is kept alongside so combinatorial
// solvers can work on the same model.
class ScheduleModel {
 public:
  const ComputeGraph &graph() const { return graph_; }
  int num_stages() const { return num_stages_; }
  const StageDomains &domains() const { return domains_; }
  Bytes cache_capacity() const { return cache_capacity_; }
  const SchedulePolicy &policy() const { return policy_; }

  const std::vector<Variable> &variables() const { return vars_; }
  const std::vector<Constraint> &constraints() const { return constraints_; }
  // Objective expressions in fixed order (peak, total off-cache, max comm).
  const std::array<LinearExpr, 3> &objectives() const { return objectives_; }
  // Constraints that folded to a false constant during elimination.
  const std::vector<Constraint> &conflicts() const { return conflicts_; }

  const LinearExpr &assign(NodeId v, Stage k) const { return assign_[static_cast<std::size_t>(v)][k]; }
  const LinearExpr &stage_expr(NodeId v) const { return stage_[static_cast<std::size_t>(v)]; }
  std::size_t num_binaries() const;
  std::size_t count(ConstraintClass c) const;
  std::map<ConstraintClass, std::size_t> census() const;

  // Completes a schedule into a full variable vector (auxiliaries at their
  // tightest values). Requires the schedule to lie inside the domains.
  std::vector<std::int64_t> encode(const Schedule &s) const;
  Schedule decode(const std::vector<std::int64_t> &point) const;
  bool feasible(const std::vector<std::int64_t> &point, std::string *why = nullptr) const;
  ObjectiveVector objective(const std::vector<std::int64_t> &point) const;

 private:
  friend ScheduleModel build_model(const ComputeGraph &, int, const StageDomains &, Bytes, const SchedulePolicy &);

  VarId add_var(std::string name, VarKind kind, std::int64_t lb, std::optional<std::int64_t> ub);
  void add_constraint(Constraint c);

  ComputeGraph graph_;
  int num_stages_ = 1;
  StageDomains domains_;
  Bytes cache_capacity_ = kDefaultCacheBytes;
  SchedulePolicy policy_;

  std::vector<Variable> vars_;
  std::vector<Constraint> constraints_;
  std::vector<Constraint> conflicts_;
  std::array<LinearExpr, 3> objectives_;

  std::vector<std::vector<LinearExpr>> assign_;  // x[v][k]
  std::vector<LinearExpr> stage_;                // S[v]
  std::vector<LinearExpr> crossing_;             // b[e], by edge index
  std::vector<std::vector<LinearExpr>> cross_at_;  // a[e][k], k < K-1
  std::vector<std::vector<bool>> cross_own_;       // a[e][k] has its own variable
  std::vector<VarId> mem_, offcache_, comm_;
  VarId peak_ = -1;
  VarId comm_max_ = -1;
};

ScheduleModel build_model(const ComputeGraph &g, int num_stages, const StageDomains &domains,
                          Bytes cache_capacity = kDefaultCacheBytes, const SchedulePolicy &policy = {});

// CPLEX LP text. Objectives are emitted as a "Minimize multi-objectives"
// section; the first-ranked objective gets Priority=3 and is solved first.
std::string to_lp(const ScheduleModel &m, ObjectiveOrder order = ObjectiveOrder::kPeakOffcacheComm);

}  // namespace incsched

#endif  // INCSCHED_MODEL_H_
