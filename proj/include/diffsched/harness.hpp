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

// Experiment plumbing: file formats for schedules and trajectories, and the
// timed multi-method comparison driver.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffsched/engine.hpp"
#include "diffsched/graph.hpp"
#include "diffsched/losses.hpp"

namespace diffsched {

// ---- schedule JSON --------------------------------------------------------
//   {"L":3,"stages":{"a":0,"b":1},
//    "metrics":{"peak_mem":1,"comm_total":1,"lp_objective":11,"ratio":10}}

struct ScheduleFile {
  int latency = 0;
  Schedule schedule;
  // Present only when the file carried a metrics object.
  std::optional<double> peak_mem, comm_total, lp_objective, ratio;
};

/// Metrics are computed with discrete_metrics, so `s` must be legal.
std::string schedule_to_json(const SchedGraph& g, const Schedule& s, int latency, double ratio);

/// Throws ParseError on malformed input, unknown node ids or missing nodes.
ScheduleFile schedule_from_json(const SchedGraph& g, std::string_view text);

// ---- trajectory CSV -------------------------------------------------------

inline constexpr std::string_view kTrajectoryHeader =
    "epoch,wall_ms,loss_total,loss_entropy,loss_comm,peak_mem,comm_total,lp_objective,best_objective";

/// Doubles are written in shortest round-trip form.
std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& trajectory);
std::vector<TrajectoryPoint> trajectory_from_csv(std::string_view text);

// ---- comparison -----------------------------------------------------------

enum class Method { Diff, Asap, Alap, Greedy, Oracle };

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

struct CompareConfig {
  RunConfig run;  // latency, ratio and optimizer settings for every method
  int seeds = 1;  // concurrent restarts of the differentiable method
  std::vector<Method> methods{Method::Diff, Method::Asap, Method::Alap, Method::Greedy, Method::Oracle};
  std::int64_t timeout_ms = 60000;
  std::int64_t sample_interval_ms = 1000;
};

/// 11 sampling points 360 s apart.
CompareConfig paper_compare_preset();

/// Sampling instants 0, interval, 2*interval, ... up to timeout (just {0}
/// when timeout is 0).
std::vector<std::int64_t> sampling_points(std::int64_t timeout_ms, std::int64_t interval_ms);

struct MethodSeries {
  Method method = Method::Diff;
  bool skipped = false;  // oracle on an instance that is too large
  std::string note;
  std::vector<double> best_objective;  // one per sampling point
  std::vector<double> normalized;      // best_objective / best_objective[0]
  double final_objective = 0.0;
  Schedule schedule;
};

struct ExperimentReport {
  std::string note;
  CompareConfig config;
  std::vector<std::int64_t> time_ms;
  std::vector<MethodSeries> series;
};

/// Runs every requested method against a shared wall clock. Differentiable
/// restarts (seeds run.seed, run.seed+1, ...) execute on their own threads and
/// are merged into one running best. Heuristics produce a single schedule, so
/// their series are flat. The oracle reports the incumbent at each point.
ExperimentReport compare(const SchedGraph& g, const CompareConfig& config);

std::string report_to_json(const SchedGraph& g, const ExperimentReport& report);
/// Columns: method,sample_index,time_ms,best_objective,normalized
std::string report_to_csv(const ExperimentReport& report);

}  // namespace diffsched
