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

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "incsched/error.h"
#include "json.hpp"

namespace incsched {
namespace {
constexpr const char *kModule = "graph-core";
using nlohmann::json;

json parse_document(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(kModule, std::string("malformed document: ") + e.what());
  }
}

void check_version(const json &doc) {
  if (!doc.is_object()) throw Error(kModule, "malformed document: top level must be an object");
  auto it = doc.find("format_version");
  if (it == doc.end() || !it->is_number_integer()) {
    throw Error(kModule, "malformed document: missing integer format_version");
  }
  if (it->get<int>() != kFormatVersion) {
    throw Error(kModule, "unsupported format_version " + std::to_string(it->get<int>()));
  }
}

std::int64_t require_int(const json &obj, const char *key, const char *what) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw Error(kModule, std::string("malformed document: ") + what + " needs integer '" + key + "'");
  }
  return it->get<std::int64_t>();
}
}  // namespace

ComputeGraph parse_graph(const std::string &text) {
  json doc = parse_document(text);
  check_version(doc);
  auto nodes_it = doc.find("nodes");
  auto edges_it = doc.find("edges");
  if (nodes_it == doc.end() || !nodes_it->is_array()) throw Error(kModule, "malformed document: 'nodes' array missing");
  if (edges_it == doc.end() || !edges_it->is_array()) throw Error(kModule, "malformed document: 'edges' array missing");

  std::unordered_map<std::int64_t, NodeId> dense;
  std::vector<NodeAttr> nodes;
  nodes.reserve(nodes_it->size());
  for (const auto &jn : *nodes_it) {
    if (!jn.is_object()) throw Error(kModule, "malformed document: node entries must be objects");
    std::int64_t file_id = require_int(jn, "id", "node");
    NodeAttr attr;
    attr.id = static_cast<NodeId>(nodes.size());
    auto name_it = jn.find("name");
    if (name_it == jn.end() || !name_it->is_string()) {
      throw Error(kModule, "malformed document: node " + std::to_string(file_id) + " needs string 'name'");
    }
    attr.name = name_it->get<std::string>();
    attr.param_bytes = require_int(jn, "param_bytes", "node");
    attr.out_bytes = require_int(jn, "out_bytes", "node");
    if (attr.param_bytes < 0 || attr.out_bytes < 0) {
      throw Error(kModule, "negative attribute on node " + std::to_string(file_id));
    }
    if (!dense.emplace(file_id, attr.id).second) {
      throw Error(kModule, "malformed document: duplicate node id " + std::to_string(file_id));
    }
    nodes.push_back(std::move(attr));
  }

  std::vector<Edge> edges;
  edges.reserve(edges_it->size());
  for (const auto &je : *edges_it) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() || !je[1].is_number_integer()) {
      throw Error(kModule, "malformed document: edges must be [src, dst] integer pairs");
    }
    auto src = dense.find(je[0].get<std::int64_t>());
    auto dst = dense.find(je[1].get<std::int64_t>());
    if (src == dense.end() || dst == dense.end()) {
      throw Error(kModule, "dangling edge endpoint [" + je[0].dump() + "," + je[1].dump() + "]");
    }
    edges.push_back({src->second, dst->second});
  }
  return ComputeGraph(std::move(nodes), std::move(edges));
}

std::string serialize_graph(const ComputeGraph &g) {
  std::ostringstream os;
  os << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"nodes\": [";
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto &n = g.nodes()[i];
    os << (i ? ",\n    " : "\n    ") << "{\"id\": " << n.id << ", \"name\": " << json(n.name).dump()
       << ", \"param_bytes\": " << n.param_bytes << ", \"out_bytes\": " << n.out_bytes << "}";
  }
  os << (g.num_nodes() ? "\n  ],\n" : "],\n") << "  \"edges\": [";
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const auto &e = g.edges()[i];
    os << (i ? ", " : "") << "[" << e.src << ", " << e.dst << "]";
  }
  os << "]\n}\n";
  return os.str();
}

ComputeGraph read_graph_file(const std::filesystem::path &path) { return parse_graph(read_text_file(path)); }

void write_graph_file(const std::filesystem::path &path, const ComputeGraph &g) {
  write_text_file(path, serialize_graph(g));
}

ScheduleFile parse_schedule(const std::string &text) {
  json doc = parse_document(text);
  check_version(doc);
  ScheduleFile out;
  out.num_stages = static_cast<int>(require_int(doc, "num_stages", "schedule"));
  auto asg = doc.find("assignment");
  if (asg == doc.end() || !asg->is_object()) throw Error(kModule, "malformed document: 'assignment' object missing");
  for (const auto &[key, value] : asg->items()) {
    std::int64_t id = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
    if (ec != std::errc() || ptr != key.data() + key.size()) {
      throw Error(kModule, "malformed document: assignment key '" + key + "' is not a node id");
    }
    if (!value.is_number_integer()) {
      throw Error(kModule, "malformed document: stage for node " + key + " must be an integer");
    }
    out.assignment[id] = value.get<std::int64_t>();
  }
  if (auto meta = doc.find("meta"); meta != doc.end() && meta->is_object()) {
    if (auto p = meta->find("producer"); p != meta->end() && p->is_string()) out.meta.producer = p->get<std::string>();
    if (auto gm = meta->find("gamma"); gm != meta->end() && gm->is_number_integer()) out.meta.gamma = gm->get<int>();
  }
  return out;
}

std::string serialize_schedule(const Schedule &s, const ScheduleMeta &meta) {
  std::ostringstream os;
  os << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"num_stages\": " << s.num_stages
     << ",\n  \"assignment\": {";
  for (std::size_t v = 0; v < s.stage.size(); ++v) {
    os << (v ? ", " : "") << "\"" << v << "\": " << s.stage[v];
  }
  os << "},\n  \"meta\": {\"producer\": " << json(meta.producer).dump() << ", \"gamma\": "
     << (meta.gamma ? std::to_string(*meta.gamma) : std::string("null")) << "}\n}\n";
  return os.str();
}

void write_schedule_file(const std::filesystem::path &path, const Schedule &s, const ScheduleMeta &meta) {
  write_text_file(path, serialize_schedule(s, meta));
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
  if (!out) throw Error("io", "write failed for " + path.string());
}

}  // namespace incsched
