# Copyright 2026 The incsched Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Pipeline stage scheduling with incremental exact refinement."""

from ._core import (
    FORMAT_VERSION,
    Graph,
    IncschedError,
    asap_levels,
    boundary_edges,
    brute_force,
    coarse_schedule,
    generate_dag,
    inc_ilp,
    load_schedule,
    relax_window,
    repair_schedule,
    schedule_metrics,
    to_lp,
    validate_schedule,
)

__all__ = [
    "FORMAT_VERSION",
    "Graph",
    "IncschedError",
    "asap_levels",
    "boundary_edges",
    "brute_force",
    "coarse_schedule",
    "generate_dag",
    "inc_ilp",
    "load_schedule",
    "relax_window",
    "repair_schedule",
    "schedule_metrics",
    "to_lp",
    "validate_schedule",
]
