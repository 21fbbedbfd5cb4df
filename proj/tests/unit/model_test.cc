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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "incsched/coarse.h"
#include "incsched/error.h"
#include "test_support.h"

namespace incsched {
namespace {

using testing::chain;

std::vector<std::int64_t> point3(std::int64_t a, std::int64_t b, std::int64_t c) { return {a, b, c}; }

template <std::size_t N>
bool all_hold(const std::array<Constraint, N> &cs, const std::vector<std::int64_t> &p) {
  for (const auto &c : cs) {
    if (!c.satisfied(p)) return false;
  }
  return true;
}

TEST(AndLinearizationTest, TruthTable) {
  const auto cs = and_constraints(LinearExpr::var(0), LinearExpr::var(1), LinearExpr::var(2));
  int feasible = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) {
        const bool ok = all_hold(cs, point3(x, y, z));
        EXPECT_EQ(ok, z == (x & y)) << x << y << z;
        feasible += ok;
      }
    }
  }
  EXPECT_EQ(feasible, 4);
}

TEST(CrossingLinearizationTest, ExactOverMonotonePairs) {
  for (int K = 1; K <= 6; ++K) {
    const auto cs = crossing_constraints(LinearExpr::var(0), LinearExpr::var(1), LinearExpr::var(2), K);
    for (int si = 0; si < K; ++si) {
      for (int sj = 0; sj < K; ++sj) {
        for (int b = 0; b < 2; ++b) {
          const bool ok = all_hold(cs, point3(si, sj, b));
          // A reversed pair admits no indicator value at all.
          const bool want = si <= sj && b == (si < sj ? 1 : 0);
          EXPECT_EQ(ok, want) << "K=" << K << " si=" << si << " sj=" << sj << " b=" << b;
        }
      }
    }
  }
}

TEST(BuildModelTest, TwoChainCensus) {
  const auto g = chain({4, 4}, {2, 0});
  const auto m = build_model(g, 2, StageDomains::full(2, 2), 8);
  EXPECT_EQ(m.count(ConstraintClass::kExactlyOne), 2u);
  EXPECT_EQ(m.count(ConstraintClass::kDependence), 1u);
  EXPECT_EQ(m.count(ConstraintClass::kCrossing), 2u);
  EXPECT_EQ(m.count(ConstraintClass::kAnd), 3u);
  EXPECT_EQ(m.count(ConstraintClass::kMemoryDef), 2u);
  EXPECT_EQ(m.count(ConstraintClass::kPeak), 2u);
  EXPECT_EQ(m.count(ConstraintClass::kOffcache), 2u);
  EXPECT_EQ(m.count(ConstraintClass::kCommDef), 1u);
  EXPECT_EQ(m.count(ConstraintClass::kCommMax), 1u);
  EXPECT_EQ(m.count(ConstraintClass::kNonEmpty), 2u);
  EXPECT_EQ(m.constraints().size(), 18u);
  // 4 assignment binaries, one crossing indicator, one per-stage crossing.
  EXPECT_EQ(m.num_binaries(), 6u);
  EXPECT_TRUE(m.conflicts().empty());
  const auto without = build_model(g, 2, StageDomains::full(2, 2), 8, SchedulePolicy{false});
  EXPECT_EQ(without.count(ConstraintClass::kNonEmpty), 0u);
}

TEST(BuildModelTest, FrozenNodesAddNoSearchVariables) {
  const auto g = chain({4, 4, 4}, {1, 1, 1});
  const Schedule s{2, {0, 0, 1}};
  const auto m = build_model(g, 2, StageDomains::fixed(s));
  EXPECT_EQ(m.num_binaries(), 0u);
  EXPECT_EQ(m.count(ConstraintClass::kExactlyOne), 0u);
  EXPECT_EQ(m.count(ConstraintClass::kDependence), 0u);
  EXPECT_EQ(m.count(ConstraintClass::kCrossing), 0u);
  EXPECT_EQ(m.count(ConstraintClass::kAnd), 0u);
  EXPECT_TRUE(m.conflicts().empty());
  const auto p = m.encode(s);
  EXPECT_TRUE(m.feasible(p));
  EXPECT_EQ(m.objective(p), (ObjectiveVector{8, 0, 1}));

  // One free node in the middle: two assignment binaries, one indicator per
  // edge, and only the second edge needs its own per-stage crossing.
  const auto partial = build_model(g, 2, StageDomains(2, {0b01, 0b11, 0b10}));
  EXPECT_EQ(partial.num_binaries(), 5u);
  EXPECT_EQ(partial.count(ConstraintClass::kExactlyOne), 1u);
  EXPECT_EQ(partial.count(ConstraintClass::kAnd), 3u);
}

TEST(BuildModelTest, FixedConflictIsRecorded) {
  const auto g = chain({1, 1}, {1, 1});
  const auto m = build_model(g, 2, StageDomains::fixed(Schedule{2, {1, 0}}));
  ASSERT_FALSE(m.conflicts().empty());
  EXPECT_EQ(m.conflicts().front().cls, ConstraintClass::kDependence);
  std::string why;
  EXPECT_FALSE(m.feasible(std::vector<std::int64_t>(m.variables().size(), 0), &why));
  EXPECT_NE(why.find("dependence"), std::string::npos);
}

TEST(BuildModelTest, SingleStage) {
  const auto g = chain({3, 5}, {1, 1});
  const auto m = build_model(g, 1, StageDomains::full(2, 1), 4);
  EXPECT_EQ(m.num_binaries(), 0u);
  EXPECT_EQ(m.count(ConstraintClass::kCommDef), 0u);
  const auto p = m.encode(Schedule{1, {0, 0}});
  EXPECT_TRUE(m.feasible(p));
  EXPECT_EQ(m.objective(p), (ObjectiveVector{8, 4, 0}));
}

TEST(BuildModelTest, RejectsMismatchedDomains) {
  const auto g = chain({1, 1}, {1, 1});
  EXPECT_THROW(build_model(g, 3, StageDomains::full(2, 2)), Error);
  EXPECT_THROW(build_model(g, 2, StageDomains::full(3, 2)), Error);
  EXPECT_THROW(build_model(g, 0, StageDomains::full(2, 2)), Error);
  const auto m = build_model(g, 2, StageDomains::fixed(Schedule{2, {0, 1}}));
  EXPECT_THROW(m.encode(Schedule{2, {0, 0}}), Error);
}

TEST(BuildModelTest, EncodedSchedulesAgreeWithMetrics) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = testing::random_graph(rng, 7, 0.35, 50, 30);
    const int K = 1 + static_cast<int>(rng() % 4);
    const Bytes cache = 60;
    std::uniform_int_distribution<int> pick(0, K - 1);
    std::vector<Stage> s(g.num_nodes());
    for (auto &x : s) x = pick(rng);
    const bool valid = testing::oracle_valid(g, s, K, true);
    // Mix of full domains and domains pinned on a random subset.
    std::vector<std::uint64_t> masks(g.num_nodes(), (std::uint64_t{1} << K) - 1);
    if (trial % 2) {
      for (std::size_t v = 0; v < masks.size(); ++v) {
        if (rng() % 2) masks[v] = std::uint64_t{1} << s[v];
      }
    }
    const auto m = build_model(g, K, StageDomains(K, masks), cache);
    const auto p = m.encode(Schedule{K, s});
    EXPECT_EQ(m.feasible(p), valid) << "trial " << trial;
    EXPECT_EQ(m.decode(p).stage, s);
    if (valid) EXPECT_EQ(m.objective(p), testing::oracle_metrics(g, s, K, cache).vec()) << "trial " << trial;
  }
}

TEST(BuildModelTest, FeasibilityRejectsLooseAuxiliaries) {
  const auto g = chain({4, 4}, {2, 0});
  const auto m = build_model(g, 2, StageDomains::full(2, 2), 8);
  auto p = m.encode(Schedule{2, {0, 1}});
  ASSERT_TRUE(m.feasible(p));
  // Dropping the peak below a stage total breaks a peak row.
  for (std::size_t i = 0; i < m.variables().size(); ++i) {
    if (m.variables()[i].name == "m_peak") p[i] = 3;
  }
  std::string why;
  EXPECT_FALSE(m.feasible(p, &why));
  EXPECT_NE(why.find("peak"), std::string::npos);
}

TEST(LpExportTest, SectionsAndPriorities) {
  const auto g = chain({4, 4}, {2, 0});
  const auto m = build_model(g, 2, StageDomains::full(2, 2), 8);
  const auto lp = to_lp(m);
  for (const char *section : {"Minimize multi-objectives\n", "Subject To\n", "Bounds\n", "Binaries\n", "Generals\n"}) {
    EXPECT_NE(lp.find(section), std::string::npos) << section;
  }
  EXPECT_EQ(lp.substr(lp.size() - 4), "End\n");
  EXPECT_NE(lp.find(" peak: Priority=3 m_peak\n"), std::string::npos);
  EXPECT_NE(lp.find(" offcache: Priority=2 o_0 + o_1\n"), std::string::npos);
  EXPECT_NE(lp.find(" comm: Priority=1 com_max\n"), std::string::npos);
  EXPECT_NE(lp.find(" one_0: x_0_0 + x_0_1 = 1\n"), std::string::npos);
  EXPECT_NE(lp.find(" 0 <= m_peak <= +inf\n"), std::string::npos);
  const auto swapped = to_lp(m, ObjectiveOrder::kPeakCommOffcache);
  EXPECT_NE(swapped.find(" comm: Priority=2 com_max\n"), std::string::npos);

  // One row per constraint between "Subject To" and "Bounds".
  const auto begin = lp.find("Subject To\n") + 11;
  const auto end = lp.find("Bounds\n");
  std::istringstream rows(lp.substr(begin, end - begin));
  std::size_t count = 0;
  for (std::string line; std::getline(rows, line);) ++count;
  EXPECT_EQ(count, m.constraints().size());
}

}  // namespace
}  // namespace incsched
