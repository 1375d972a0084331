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

#include <span>
#include <vector>

#include "diffsched/autodiff.hpp"
#include "diffsched/graph.hpp"

namespace diffsched {

/// Floor applied to probabilities inside x*log(x) so that empty stages
/// contribute 0 (error below 1e-28).
inline constexpr double kLogFloor = 1e-30;

struct LossBreakdown {
  double total = 0.0;
  double entropy = 0.0;
  double comm = 0.0;
  double lambda = 0.0;
};

struct DiscreteMetrics {
  double peak_mem = 0.0;
  std::vector<double> stage_mem;      // length L
  std::vector<double> boundary_comm;  // length L-1; m_i = cost crossing i|i+1
  double comm_total = 0.0;
  double lp_objective = 0.0;  // comm_total + ratio * peak_mem
};

/// Entropy of the memory distribution over stages:
///   H = -sum_i (N_i/M) log(N_i/M),  N_i = sum_v mem_v * s_v[i],  M = sum_v mem_v.
/// H is 0 when everything sits in one stage and ln(stages) for an even split.
/// Throws std::domain_error when M == 0.
DiffVector entropy_loss(Tape& tape, std::span<const DiffVector> hard, std::span<const double> mem, int stages);

/// Mean inter-stage communication:
///   L_c = (sum_i m_i) / (sum_e c_e),
///   m_i = sum_e c_e * cumsum(s_src)[i] * (1 - cumsum(s_dst)[i]),  i in [0, stages-2].
/// Zero when the graph carries no communication cost.
DiffVector comm_loss(Tape& tape, std::span<const DiffVector> hard, const SchedGraph& g, int stages);

/// lambda * entropy + comm.
LossBreakdown total_loss(double entropy, double comm, double lambda);
DiffVector total_loss(Tape& tape, DiffVector entropy, DiffVector comm, double lambda);

/// Memory-balance term minimized by the optimizer: ln(stages) - H. It is zero
/// for a perfectly even split and ln(stages) when one stage holds everything.
DiffVector entropy_gap(Tape& tape, DiffVector entropy, int stages);

/// Exact evaluation of a hard schedule. Throws ValidationError when illegal.
DiscreteMetrics discrete_metrics(const SchedGraph& g, const Schedule& s, int stages, double ratio);

/// Plain-double entropy of a hard schedule (same definition as entropy_loss).
double schedule_entropy(const SchedGraph& g, const Schedule& s, int stages);

/// Running best divided by the first value. Throws std::invalid_argument on an
/// empty input or a nonpositive first value.
std::vector<double> normalized_progress(std::span<const double> objectives);

}  // namespace diffsched
