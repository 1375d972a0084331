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

#include "diffsched/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diffsched {

namespace {

constexpr double kTieTolerance = 1e-9;

void require_feasible(const SchedGraph& g, int stages) {
  const int min_latency = min_feasible_latency(g);
  if (stages < min_latency) {
    throw InfeasibleError("latency " + std::to_string(stages) + " is below the minimum feasible latency " +
                              std::to_string(min_latency),
                          min_latency);
  }
}

// Earliest stage for v given the stages of its (already placed) predecessors.
int lower_bound_from_preds(const SchedGraph& g, const std::vector<int>& stage, std::size_t v) {
  int lo = 0;
  for (std::size_t e : g.in_edges(v)) {
    const IndexedEdge& edge = g.edges()[e];
    lo = std::max(lo, stage[edge.src] - edge.sdc_c);
  }
  return lo;
}

double incoming_comm(const SchedGraph& g, const std::vector<int>& stage, std::size_t v, int s) {
  double c = 0.0;
  for (std::size_t e : g.in_edges(v)) {
    const IndexedEdge& edge = g.edges()[e];
    if (s > stage[edge.src]) c += edge.comm * (s - stage[edge.src]);
  }
  return c;
}

class BranchAndBound {
 public:
  BranchAndBound(const SchedGraph& g, int stages, double ratio, const IncumbentCallback& cb)
      : g_(g),
        stages_(stages),
        ratio_(ratio),
        cb_(cb),
        order_(g.topo_order().begin(), g.topo_order().end()),
        latest_(latest_stages(g, stages)),
        stage_(g.num_nodes(), -1),
        stage_mem_(static_cast<std::size_t>(stages), 0.0) {}

  OracleResult solve() {
    dfs(0, 0.0, 0.0);
    OracleResult r;
    r.schedule.stage = best_;
    r.objective = best_objective_;
    r.metrics = discrete_metrics(g_, r.schedule, stages_, ratio_);
    r.leaves = leaves_;
    return r;
  }

 private:
  void dfs(std::size_t depth, double comm, double peak) {
    if (have_best_ && comm + ratio_ * peak > best_objective_ + kTieTolerance) return;
    if (depth == order_.size()) {
      ++leaves_;
      leaf(comm + ratio_ * peak);
      return;
    }
    const std::size_t v = order_[depth];
    const double mem = g_.node(v).mem;
    const int lo = lower_bound_from_preds(g_, stage_, v);
    for (int s = lo; s <= latest_[v]; ++s) {
      stage_[v] = s;
      auto& slot = stage_mem_[static_cast<std::size_t>(s)];
      slot += mem;
      dfs(depth + 1, comm + incoming_comm(g_, stage_, v, s), std::max(peak, slot));
      slot -= mem;
    }
    stage_[v] = -1;
  }

  void leaf(double objective) {
    const bool better = !have_best_ || objective < best_objective_ - kTieTolerance;
    const bool tie_smaller = have_best_ && !better && objective <= best_objective_ + kTieTolerance &&
                             std::lexicographical_compare(stage_.begin(), stage_.end(), best_.begin(), best_.end());
    if (!better && !tie_smaller) return;
    best_ = stage_;
    if (better || objective < best_objective_) best_objective_ = objective;
    have_best_ = true;
    if (better && cb_) cb_(Schedule{best_}, best_objective_);
  }

  const SchedGraph& g_;
  int stages_;
  double ratio_;
  const IncumbentCallback& cb_;
  std::vector<std::size_t> order_;
  std::vector<int> latest_;
  std::vector<int> stage_;
  std::vector<double> stage_mem_;
  std::vector<int> best_;
  double best_objective_ = 0.0;
  bool have_best_ = false;
  std::uint64_t leaves_ = 0;
};

}  // namespace

OracleResult brute_force(const SchedGraph& g, int stages, double ratio, const IncumbentCallback& on_incumbent) {
  if (stages < 1) throw std::invalid_argument("brute_force: stages must be >= 1");
  const double space = std::pow(static_cast<double>(stages), static_cast<double>(g.num_nodes()));
  if (space > kBruteForceLimit) {
    throw std::length_error("brute_force: " + std::to_string(stages) + "^" + std::to_string(g.num_nodes()) +
                            " assignments exceed the enumeration limit");
  }
  require_feasible(g, stages);
  return BranchAndBound(g, stages, ratio, on_incumbent).solve();
}

Schedule asap(const SchedGraph& g, int stages) {
  require_feasible(g, stages);
  return Schedule{earliest_stages(g)};
}

Schedule alap(const SchedGraph& g, int stages) {
  require_feasible(g, stages);
  return Schedule{latest_stages(g, stages)};
}

Schedule greedy_balance(const SchedGraph& g, int stages, double ratio) {
  require_feasible(g, stages);
  const auto latest = latest_stages(g, stages);
  std::vector<int> stage(g.num_nodes(), -1);
  std::vector<double> stage_mem(static_cast<std::size_t>(stages), 0.0);
  double peak = 0.0;
  double comm = 0.0;

  for (std::size_t v : g.topo_order()) {
    const double mem = g.node(v).mem;
    int pick = -1;
    double pick_obj = 0.0;
    double pick_comm = 0.0;
    for (int s = lower_bound_from_preds(g, stage, v); s <= latest[v]; ++s) {
      const double c = incoming_comm(g, stage, v, s);
      const double obj = comm + c + ratio * std::max(peak, stage_mem[static_cast<std::size_t>(s)] + mem);
      bool take = pick < 0 || obj < pick_obj - kTieTolerance;
      if (!take && obj <= pick_obj + kTieTolerance)
        take = stage_mem[static_cast<std::size_t>(s)] < stage_mem[static_cast<std::size_t>(pick)];
      if (take) {
        pick = s;
        pick_obj = obj;
        pick_comm = c;
      }
    }
    stage[v] = pick;
    comm += pick_comm;
    stage_mem[static_cast<std::size_t>(pick)] += mem;
    peak = std::max(peak, stage_mem[static_cast<std::size_t>(pick)]);
  }
  return Schedule{stage};
}

}  // namespace diffsched
