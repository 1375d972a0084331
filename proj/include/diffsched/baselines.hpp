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
#include <functional>

#include "diffsched/graph.hpp"
#include "diffsched/losses.hpp"

namespace diffsched {

/// Largest search space (stages^nodes) brute_force accepts.
inline constexpr double kBruteForceLimit = 1e7;

struct OracleResult {
  Schedule schedule;
  double objective = 0.0;
  DiscreteMetrics metrics;
  std::uint64_t leaves = 0;  // complete assignments evaluated
};

/// Called whenever the search finds a strictly better complete schedule.
using IncumbentCallback = std::function<void(const Schedule&, double objective)>;

/// Exact minimizer of comm_total + ratio * peak_mem by depth-first search in
/// topological order. Stage ranges are cut to the legal window of each node
/// and branches whose partial cost already exceeds the incumbent are pruned.
/// Among optimal schedules the lexicographically smallest stage vector (in
/// declaration order) wins.
///
/// Throws std::length_error when stages^nodes > kBruteForceLimit and
/// InfeasibleError when stages < min_feasible_latency(g).
OracleResult brute_force(const SchedGraph& g, int stages, double ratio, const IncumbentCallback& on_incumbent = {});

/// Every node at its earliest legal stage.
Schedule asap(const SchedGraph& g, int stages);
/// Every node at its latest legal stage.
Schedule alap(const SchedGraph& g, int stages);

/// List-scheduling style greedy: nodes in topological order, each placed on the
/// legal stage with the smallest resulting objective (ties: emptier stage,
/// then lower stage).
Schedule greedy_balance(const SchedGraph& g, int stages, double ratio);

}  // namespace diffsched
