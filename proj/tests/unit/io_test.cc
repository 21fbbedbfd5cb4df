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

#include "incsched/io.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>

#include "incsched/dag_gen.h"
#include "incsched/error.h"

namespace incsched {
namespace {

std::string error_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

TEST(GraphIoTest, ParsesThreeNodeChain) {
  const auto g = parse_graph(R"({"format_version": 1,
    "nodes": [{"id": 0, "name": "A", "param_bytes": 1, "out_bytes": 1},
              {"id": 1, "name": "B", "param_bytes": 1, "out_bytes": 1},
              {"id": 2, "name": "C", "param_bytes": 1, "out_bytes": 1}],
    "edges": [[0, 1], [1, 2]]})");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.node(2).name, "C");
}

TEST(GraphIoTest, CycleRejected) {
  const auto msg = error_of([] {
    parse_graph(R"({"format_version": 1,
      "nodes": [{"id": 0, "name": "A", "param_bytes": 1, "out_bytes": 1},
                {"id": 1, "name": "B", "param_bytes": 1, "out_bytes": 1}],
      "edges": [[1, 0], [0, 1]]})");
  });
  EXPECT_NE(msg.find("cycle detected"), std::string::npos) << msg;
}

TEST(GraphIoTest, SparseIdsAreDensifiedInInputOrder) {
  const auto g = parse_graph(R"({"format_version": 1,
    "nodes": [{"id": 70, "name": "X", "param_bytes": 2, "out_bytes": 3},
              {"id": 5, "name": "Y", "param_bytes": 4, "out_bytes": 5}],
    "edges": [[70, 5]]})");
  EXPECT_EQ(g.node(0).name, "X");
  EXPECT_EQ(g.edges().front(), (Edge{0, 1}));
}

TEST(GraphIoTest, MalformedDocuments) {
  EXPECT_NE(error_of([] { parse_graph("{not json"); }).find("malformed document"), std::string::npos);
  EXPECT_NE(error_of([] { parse_graph(R"({"nodes": [], "edges": []})"); }).find("format_version"), std::string::npos);
  EXPECT_NE(error_of([] { parse_graph(R"({"format_version": 2, "nodes": [], "edges": []})"); })
                .find("unsupported format_version"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_graph(R"({"format_version": 1, "edges": []})"); }).find("'nodes'"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_graph(R"({"format_version": 1, "nodes": [{"id": 0, "name": "A", "param_bytes": -1,
                "out_bytes": 0}], "edges": []})");
            }).find("negative"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_graph(R"({"format_version": 1, "nodes": [{"id": 0, "name": "A", "param_bytes": 1,
                "out_bytes": 0}], "edges": [[0, 9]]})");
            }).find("dangling"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_graph(R"({"format_version": 1, "nodes": [{"id": 0, "name": "A", "param_bytes": 1,
                "out_bytes": 0}, {"id": 0, "name": "B", "param_bytes": 1, "out_bytes": 0}], "edges": []})");
            }).find("duplicate node id"),
            std::string::npos);
}

TEST(GraphIoTest, GeneratedGraphsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenSpec spec;
    spec.num_nodes = 30;
    spec.max_in_degree = 2 + static_cast<int>(seed % 5);
    spec.seed = seed;
    const auto g = generate_dag(spec);
    const auto text = serialize_graph(g);
    const auto back = parse_graph(text);
    EXPECT_EQ(back, g) << "seed " << seed;
    EXPECT_EQ(serialize_graph(back), text);
  }
}

TEST(GraphIoTest, EmptyGraphRoundTrips) {
  const ComputeGraph g;
  EXPECT_EQ(parse_graph(serialize_graph(g)), g);
}

TEST(ScheduleIoTest, RoundTripWithMeta) {
  const Schedule s{3, {0, 1, 1, 2}};
  const auto text = serialize_schedule(s, {"inc:balanced", 4});
  const auto f = parse_schedule(text);
  EXPECT_EQ(f.num_stages, 3);
  EXPECT_EQ(f.assignment.size(), 4u);
  EXPECT_EQ(f.assignment.at(3), 2);
  EXPECT_EQ(f.meta.producer, "inc:balanced");
  EXPECT_EQ(f.meta.gamma, 4);
  EXPECT_FALSE(parse_schedule(serialize_schedule(s, {"exact", std::nullopt})).meta.gamma.has_value());
}

TEST(ScheduleIoTest, MalformedSchedules) {
  EXPECT_THROW(parse_schedule(R"({"format_version": 1, "assignment": {}})"), Error);
  EXPECT_THROW(parse_schedule(R"({"format_version": 1, "num_stages": 2, "assignment": {"x": 0}})"), Error);
  EXPECT_THROW(parse_schedule(R"({"format_version": 1, "num_stages": 2, "assignment": {"0": "a"}})"), Error);
  EXPECT_THROW(parse_schedule(R"({"format_version": 1, "num_stages": 2})"), Error);
}

TEST(TextFileTest, WriteCreatesParentsAndMissingFileErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "incsched_io_test";
  std::filesystem::remove_all(dir);
  write_text_file(dir / "a" / "b.txt", "hello");
  EXPECT_EQ(read_text_file(dir / "a" / "b.txt"), "hello");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace incsched
