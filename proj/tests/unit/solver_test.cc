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

#include <gtest/gtest.h>

#include <random>

#include "incsched/coarse.h"
#include "incsched/dag_gen.h"
#include "incsched/error.h"
#include "json.hpp"
#include "test_support.h"

namespace incsched {
namespace {

using testing::chain;
using testing::diamond;

std::string error_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

TEST(SolveLexTest, TwoChainForcedSplit) {
  const auto g = chain({4, 4}, {2, 0});
  const auto m = build_model(g, 2, StageDomains::full(2, 2), 8);
  const auto r = solve_lex(m);
  EXPECT_TRUE(r.proved_optimal);
  EXPECT_EQ(r.objective, (ObjectiveVector{4, 0, 2}));
  EXPECT_EQ(r.schedule.stage, (std::vector<Stage>{0, 1}));
  const auto b = brute_force(g, 2, StageDomains::full(2, 2), 8);
  EXPECT_EQ(b.objective, r.objective);
  EXPECT_EQ(b.nodes_expanded, 4u);
}

TEST(SolveLexTest, DiamondBalancesHeavyBranches) {
  const auto g = diamond({1, 8, 8, 1}, 4);
  const auto want = testing::oracle_optimum(g, 2, 16);
  EXPECT_EQ(want.peak_mem, 9);
  const auto r = solve_lex(build_model(g, 2, StageDomains::full(4, 2), 16));
  EXPECT_TRUE(r.proved_optimal);
  EXPECT_EQ(r.objective, want);
  EXPECT_TRUE(validate_schedule(g, r.schedule).ok());
  EXPECT_EQ(schedule_metrics(g, r.schedule, 16).objective_vector(), r.objective);
}

TEST(SolveLexTest, SingletonDomainsReturnTheFixedSchedule) {
  GenSpec spec;
  spec.num_nodes = 40;
  spec.seed = 3;
  const auto g = generate_dag(spec);
  const auto s = balanced_topo_partition(g, 4);
  const auto r = solve_lex(build_model(g, 4, StageDomains::fixed(s)));
  EXPECT_TRUE(r.proved_optimal);
  EXPECT_EQ(r.schedule, s);
  EXPECT_EQ(r.objective, schedule_metrics(g, s).objective_vector());
  EXPECT_EQ(r.free_nodes, 0u);
  EXPECT_EQ(r.total_nodes, 40u);
}

TEST(SolveLexTest, InfeasibleWhenStagesOutnumberNodes) {
  const auto g = chain({1, 1, 1}, {1, 1, 1});
  const auto d = StageDomains::full(3, 4);
  EXPECT_NE(error_of([&] { brute_force(g, 4, d); }).find("no valid assignment"), std::string::npos);
  EXPECT_NE(error_of([&] { solve_lex(build_model(g, 4, d)); }).find("infeasible model"), std::string::npos);
  // Allowing empty stages makes it feasible again.
  const auto r = solve_lex(build_model(g, 4, d, kDefaultCacheBytes, SchedulePolicy{false}));
  EXPECT_TRUE(r.proved_optimal);
  EXPECT_EQ(r.objective, testing::oracle_optimum(g, 4, kDefaultCacheBytes, false));
}

TEST(SolveLexTest, FixedConflictIsInfeasible) {
  const auto g = chain({1, 1}, {1, 1});
  const auto msg = error_of([&] { solve_lex(build_model(g, 2, StageDomains::fixed(Schedule{2, {1, 0}}))); });
  EXPECT_NE(msg.find("infeasible model"), std::string::npos) << msg;
}

TEST(BruteForceTest, GuardRejectsLargeProducts) {
  GenSpec spec;
  spec.num_nodes = 30;
  const auto g = generate_dag(spec);
  const auto msg = error_of([&] { brute_force(g, 4, StageDomains::full(30, 4)); });
  EXPECT_NE(msg.find("search-space guard"), std::string::npos) << msg;
}

TEST(BruteForceTest, TiesGoToSmallestAssignment) {
  // Two isolated equal nodes: {0,1} and {1,0} tie; the smaller vector wins.
  const ComputeGraph g({{0, "A", 5, 0}, {1, "B", 5, 0}}, {});
  const auto r = brute_force(g, 2, StageDomains::full(2, 2));
  EXPECT_EQ(r.schedule.stage, (std::vector<Stage>{0, 1}));
  EXPECT_TRUE(r.proved_optimal);
}

TEST(SolveLexTest, TimeLimitKeepsIncumbent) {
  GenSpec spec;
  spec.num_nodes = 120;
  spec.max_in_degree = 4;
  spec.seed = 11;
  const auto g = generate_dag(spec);
  const auto coarse = balanced_topo_partition(g, 6);
  SolveOptions opt;
  opt.time_limit_s = 0.05;
  opt.warm_start = coarse;
  const auto r = solve_lex(build_model(g, 6, StageDomains::full(120, 6)), opt);
  EXPECT_FALSE(r.proved_optimal);
  EXPECT_TRUE(validate_schedule(g, r.schedule).ok());
  EXPECT_TRUE(lex_less_equal(r.objective, schedule_metrics(g, coarse).objective_vector(),
                             ObjectiveOrder::kPeakOffcacheComm));
  EXPECT_LT(r.wall_time_s, 5.0);
}

TEST(SolveLexTest, WarmStartOutsideDomainsIsIgnored) {
  const auto g = chain({4, 4}, {2, 0});
  SolveOptions opt;
  opt.warm_start = Schedule{2, {1, 0}};
  const auto r = solve_lex(build_model(g, 2, StageDomains::full(2, 2), 8), opt);
  EXPECT_EQ(r.schedule.stage, (std::vector<Stage>{0, 1}));
}

struct RandomCase {
  bool nonempty;
  ObjectiveOrder order;
};

class SolverAgreementTest : public ::testing::TestWithParam<RandomCase> {};

TEST_P(SolverAgreementTest, MatchesBruteForceAndOracle) {
  const auto param = GetParam();
  const bool comm_second = param.order == ObjectiveOrder::kPeakCommOffcache;
  std::mt19937_64 rng(param.nonempty * 2 + comm_second + 100);
  for (int trial = 0; trial < 120; ++trial) {
    const int K = 2 + trial % 3;
    const int n = K + static_cast<int>(rng() % (K == 4 ? 5 : 6));
    // Small caches and skewed sizes so every objective matters.
    const auto g = testing::random_graph(rng, n, 0.3, 40, 25);
    const Bytes cache = 20 + static_cast<Bytes>(rng() % 40);
    const SchedulePolicy policy{param.nonempty};
    const auto d = StageDomains::full(g.num_nodes(), K);
    const auto want = testing::oracle_optimum(g, K, cache, param.nonempty, comm_second);
    const auto brute = brute_force(g, K, d, cache, policy, param.order);
    SolveOptions opt;
    opt.order = param.order;
    if (trial % 2 == 0 && param.nonempty) opt.warm_start = list_schedule(g, K);
    const auto lex = solve_lex(build_model(g, K, d, cache, policy), opt);
    EXPECT_EQ(brute.objective, want) << "trial " << trial;
    EXPECT_EQ(lex.objective, want) << "trial " << trial;
    EXPECT_TRUE(lex.proved_optimal);
    EXPECT_TRUE(validate_schedule(g, lex.schedule, policy).ok());
    EXPECT_EQ(schedule_metrics(g, lex.schedule, cache).objective_vector(), lex.objective);
  }
}

INSTANTIATE_TEST_SUITE_P(Policies, SolverAgreementTest,
                         ::testing::Values(RandomCase{true, ObjectiveOrder::kPeakOffcacheComm},
                                           RandomCase{true, ObjectiveOrder::kPeakCommOffcache},
                                           RandomCase{false, ObjectiveOrder::kPeakOffcacheComm},
                                           RandomCase{false, ObjectiveOrder::kPeakCommOffcache}));

TEST(SolverAgreementTest, PartialDomains) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    GenSpec spec;
    spec.num_nodes = 14;
    spec.max_in_degree = 2 + trial % 3;
    spec.seed = static_cast<std::uint64_t>(trial);
    const auto g = generate_dag(spec);
    const int K = 3;
    const auto coarse = balanced_topo_partition(g, K);
    const auto w = relax_window(g, coarse, static_cast<int>(rng() % 3));
    const auto d = build_domains(g, coarse, w, K);
    const Bytes cache = 4 << 20;
    const auto brute = brute_force(g, K, d, cache);
    SolveOptions opt;
    opt.warm_start = coarse;
    const auto lex = solve_lex(build_model(g, K, d, cache), opt);
    EXPECT_EQ(lex.objective, brute.objective) << "trial " << trial;
    EXPECT_TRUE(d.admits(lex.schedule));
    EXPECT_EQ(lex.free_nodes, w.free_nodes.size());
  }
}

TEST(ReportJsonTest, Fields) {
  const auto g = chain({4, 4}, {2, 0});
  auto r = solve_lex(build_model(g, 2, StageDomains::full(2, 2), 8));
  r.producer = "balanced";
  const auto doc = nlohmann::json::parse(report_json(r));
  EXPECT_EQ(doc["format_version"], 1);
  EXPECT_TRUE(doc["gamma"].is_null());
  EXPECT_EQ(doc["objective"]["peak_mem"], 4);
  EXPECT_EQ(doc["objective"]["max_comm"], 2);
  EXPECT_EQ(doc["objective_vector"], (std::vector<Bytes>{4, 0, 2}));
  EXPECT_EQ(doc["proved_optimal"], true);
  EXPECT_EQ(doc["num_stages"], 2);
  r.gamma = 3;
  EXPECT_EQ(nlohmann::json::parse(report_json(r))["gamma"], 3);
}

}  // namespace
}  // namespace incsched
