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

#ifndef INCSCHED_IO_H_
#define INCSCHED_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "incsched/graph.h"

namespace incsched {

inline constexpr int kFormatVersion = 1;

// Graph file:
//   {"format_version":1,
//    "nodes":[{"id":int,"name":str,"param_bytes":int,"out_bytes":int},...],
//    "edges":[[src,dst],...]}
// File ids may be any distinct integers; they are densified in input order.
ComputeGraph parse_graph(const std::string &text);
std::string serialize_graph(const ComputeGraph &g);
ComputeGraph read_graph_file(const std::filesystem::path &path);
void write_graph_file(const std::filesystem::path &path, const ComputeGraph &g);

struct ScheduleMeta {
  std::string producer;
  std::optional<int> gamma;
};

// Raw document contents; ids and stages are checked against a graph by
// load_coarse_schedule, not here.
struct ScheduleFile {
  int num_stages = 1;
  std::map<std::int64_t, std::int64_t> assignment;
  ScheduleMeta meta;
};

// Schedule file:
//   {"format_version":1,"num_stages":int,"assignment":{"<node_id>":stage,...},
//    "meta":{"producer":str,"gamma":int|null}}
ScheduleFile parse_schedule(const std::string &text);
std::string serialize_schedule(const Schedule &s, const ScheduleMeta &meta);
void write_schedule_file(const std::filesystem::path &path, const Schedule &s, const ScheduleMeta &meta);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

}  // namespace incsched

#endif  // INCSCHED_IO_H_
