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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "incsched/coarse.h"
#include "incsched/dag_gen.h"
#include "incsched/error.h"
#include "incsched/io.h"
#include "incsched/model.h"
#include "incsched/pipeline.h"
#include "incsched/relaxation.h"
#include "incsched/solver.h"

namespace py = pybind11;
using namespace incsched;

namespace {

ObjectiveOrder parse_order(const std::string &text) {
  if (text == "peak,offcache,comm") return ObjectiveOrder::kPeakOffcacheComm;
  if (text == "peak,comm,offcache") return ObjectiveOrder::kPeakCommOffcache;
  throw Error("python", "unknown objective order: " + text);
}

Schedule to_schedule(const std::vector<Stage> &stages, int num_stages) { return Schedule{num_stages, stages}; }

py::tuple vec_tuple(const ObjectiveVector &v) { return py::make_tuple(v.peak_mem, v.total_offcache, v.max_comm); }

py::dict report_dict(const SolveReport &r) {
  py::dict d;
  d["schedule"] = r.schedule.stage;
  d["num_stages"] = r.schedule.num_stages;
  d["objective"] = vec_tuple(r.objective);
  d["proved_optimal"] = r.proved_optimal;
  d["nodes_expanded"] = r.nodes_expanded;
  d["wall_time_s"] = r.wall_time_s;
  d["gamma"] = r.gamma ? py::object(py::int_(*r.gamma)) : py::object(py::none());
  d["producer"] = r.producer;
  d["coarse_objective"] = r.coarse_objective ? py::object(vec_tuple(*r.coarse_objective)) : py::object(py::none());
  d["free_nodes"] = r.free_nodes;
  d["total_nodes"] = r.total_nodes;
  return d;
}

ComputeGraph make_graph(const std::vector<py::dict> &nodes, const std::vector<std::pair<NodeId, NodeId>> &edges) {
  std::vector<NodeAttr> attrs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto &n = nodes[i];
    NodeAttr a;
    a.id = static_cast<NodeId>(i);
    a.name = n.contains("name") ? n["name"].cast<std::string>() : "n" + std::to_string(i);
    a.param_bytes = n.contains("param_bytes") ? n["param_bytes"].cast<Bytes>() : 0;
    a.out_bytes = n.contains("out_bytes") ? n["out_bytes"].cast<Bytes>() : 0;
    attrs.push_back(std::move(a));
  }
  std::vector<Edge> es;
  for (const auto &[s, d] : edges) es.push_back({s, d});
  return ComputeGraph(std::move(attrs), std::move(es));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "incsched core bindings";
  m.attr("FORMAT_VERSION") = kFormatVersion;

  py::register_exception<Error>(m, "IncschedError", PyExc_RuntimeError);

  py::class_<ComputeGraph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("nodes"), py::arg("edges"),
           "Nodes are dicts with name, param_bytes and out_bytes; edges are (src, dst) index pairs.")
      .def_static("from_json", &parse_graph, py::arg("text"))
      .def_static("load", &read_graph_file, py::arg("path"))
      .def("to_json", &serialize_graph)
      .def("save", [](const ComputeGraph &g, const std::filesystem::path &p) { write_graph_file(p, g); })
      .def_property_readonly("num_nodes", &ComputeGraph::num_nodes)
      .def_property_readonly("num_edges", &ComputeGraph::num_edges)
      .def_property_readonly("names",
                             [](const ComputeGraph &g) {
                               std::vector<std::string> out;
                               for (const auto &n : g.nodes()) out.push_back(n.name);
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const ComputeGraph &g) {
                               std::vector<std::pair<NodeId, NodeId>> out;
                               for (const auto &e : g.edges()) out.emplace_back(e.src, e.dst);
                               return out;
                             })
      .def("__eq__", [](const ComputeGraph &a, const ComputeGraph &b) { return a == b; });

  m.def(
      "generate_dag",
      [](int num_nodes, int max_in_degree, std::uint64_t seed) {
        GenSpec spec;
        spec.num_nodes = num_nodes;
        spec.max_in_degree = max_in_degree;
        spec.seed = seed;
        return generate_dag(spec);
      },
      py::arg("num_nodes"), py::arg("max_in_degree"), py::arg("seed"));

  m.def("asap_levels", &asap_levels, py::arg("graph"));

  m.def(
      "schedule_metrics",
      [](const ComputeGraph &g, const std::vector<Stage> &stages, int num_stages, Bytes cache_bytes) {
        const auto mt = schedule_metrics(g, to_schedule(stages, num_stages), cache_bytes);
        py::dict d;
        d["per_stage_mem"] = mt.per_stage_mem;
        d["per_stage_offcache"] = mt.per_stage_offcache;
        d["per_boundary_comm"] = mt.per_boundary_comm;
        d["objective"] = vec_tuple(mt.objective_vector());
        return d;
      },
      py::arg("graph"), py::arg("stages"), py::arg("num_stages"), py::arg("cache_bytes") = kDefaultCacheBytes);

  m.def(
      "validate_schedule",
      [](const ComputeGraph &g, const std::vector<Stage> &stages, int num_stages, bool require_nonempty) {
        std::vector<std::string> out;
        for (const auto &v : validate_schedule(g, to_schedule(stages, num_stages), SchedulePolicy{require_nonempty})
                                 .violations) {
          out.push_back(v.message);
        }
        return out;
      },
      py::arg("graph"), py::arg("stages"), py::arg("num_stages"), py::arg("require_nonempty") = true);

  m.def(
      "coarse_schedule",
      [](const ComputeGraph &g, int num_stages, const std::string &source) {
        return produce_coarse(CoarseSource::parse(source), g, num_stages).stage;
      },
      py::arg("graph"), py::arg("num_stages"), py::arg("source") = "balanced");

  m.def(
      "load_schedule",
      [](const std::filesystem::path &p, const ComputeGraph &g, int num_stages) {
        return load_coarse_schedule(p, g, num_stages).stage;
      },
      py::arg("path"), py::arg("graph"), py::arg("num_stages"));

  m.def(
      "repair_schedule",
      [](const ComputeGraph &g, const std::vector<Stage> &stages, int num_stages) {
        const auto r = repair_schedule(g, to_schedule(stages, num_stages));
        return py::make_tuple(r.schedule.stage, r.changed);
      },
      py::arg("graph"), py::arg("stages"), py::arg("num_stages"));

  m.def(
      "boundary_edges",
      [](const ComputeGraph &g, const std::vector<Stage> &stages, int num_stages) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (const auto &e : boundary_edges(g, to_schedule(stages, num_stages))) out.emplace_back(e.src, e.dst);
        return out;
      },
      py::arg("graph"), py::arg("stages"), py::arg("num_stages"));

  m.def(
      "relax_window",
      [](const ComputeGraph &g, const std::vector<Stage> &stages, int num_stages, int gamma) {
        const auto w = relax_window(g, to_schedule(stages, num_stages), gamma);
        py::dict d;
        d["empty"] = w.empty;
        d["lo_level"] = w.lo_level;
        d["hi_level"] = w.hi_level;
        d["free_nodes"] = w.free_nodes;
        d["frozen_nodes"] = w.frozen_nodes;
        return d;
      },
      py::arg("graph"), py::arg("stages"), py::arg("num_stages"), py::arg("gamma"));

  m.def(
      "to_lp",
      [](const ComputeGraph &g, int num_stages, Bytes cache_bytes, const std::string &order) {
        const auto model = build_model(g, num_stages, StageDomains::full(g.num_nodes(), num_stages), cache_bytes);
        return to_lp(model, parse_order(order));
      },
      py::arg("graph"), py::arg("num_stages"), py::arg("cache_bytes") = kDefaultCacheBytes,
      py::arg("order") = "peak,offcache,comm");

  m.def(
      "inc_ilp",
      [](const ComputeGraph &g, int num_stages, int gamma, const std::string &coarse, const std::string &mode,
         Bytes cache_bytes, double time_limit_s, const std::string &order, bool require_nonempty) {
        IncConfig c;
        c.num_stages = num_stages;
        c.gamma = gamma;
        c.coarse = CoarseSource::parse(coarse);
        c.mode = parse_mode(mode);
        c.cache_capacity = cache_bytes;
        c.time_limit_s = time_limit_s;
        c.order = parse_order(order);
        c.policy.require_nonempty_stages = require_nonempty;
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = inc_ilp(g, c);
        }
        return report_dict(r);
      },
      py::arg("graph"), py::arg("num_stages"), py::arg("gamma") = 0, py::arg("coarse") = "balanced",
      py::arg("mode") = "inc", py::arg("cache_bytes") = kDefaultCacheBytes, py::arg("time_limit_s") = 0.0,
      py::arg("order") = "peak,offcache,comm", py::arg("require_nonempty") = true);

  m.def(
      "brute_force",
      [](const ComputeGraph &g, int num_stages, Bytes cache_bytes, const std::string &order, bool require_nonempty) {
        return report_dict(brute_force(g, num_stages, StageDomains::full(g.num_nodes(), num_stages), cache_bytes,
                                       SchedulePolicy{require_nonempty}, parse_order(order)));
      },
      py::arg("graph"), py::arg("num_stages"), py::arg("cache_bytes") = kDefaultCacheBytes,
      py::arg("order") = "peak,offcache,comm", py::arg("require_nonempty") = true);
}
