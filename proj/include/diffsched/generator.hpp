/*
Copyright 2026 The diffsched Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <utility>

#include "diffsched/graph.hpp"

namespace diffsched {

struct GenSpec {
  int n_nodes = 100;
  int depth = 10;
  double density = 0.1;
  std::pair<double, double> mem_range{1.0, 1.0};
  std::pair<double, double> comm_range{1.0, 4.0};
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument for an unusable spec.
void validate_spec(const GenSpec& spec);

/// Layered random DAG. Nodes n0..n{N-1} are split into `depth` contiguous
/// layers whose sizes differ by at most one. Each node past the first layer
/// is wired to one random node of the previous layer; every other pair
/// (u in layer a, v in layer b > a) becomes an edge with probability
/// density * 0.5^(b - a - 1). Memory and comm weights are uniform over their
/// ranges, and all SDC constants are 0.
SchedGraph gen_random_workload(const GenSpec& spec);

struct ShapeStats {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::size_t depth = 0;  // nodes on the longest path
  double avg_out_degree = 0.0;
};

ShapeStats shape_stats(const SchedGraph& g);

}  // namespace diffsched
