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
#include <optional>
#include <span>
#include <vector>

#include "diffsched/graph.hpp"
#include "diffsched/losses.hpp"
#include "diffsched/rng.hpp"

namespace diffsched {

enum class OptimizerKind { Adam, AdamW };

struct RunConfig {
  int latency = 10;
  int epochs = 500;
  double lr = 0.05;
  double lambda = 10.0;  // weight of the memory-balance loss
  double ratio = 10.0;   // weight of peak memory in the discrete objective
  double tau_start = 1.0;
  double tau_end = 0.1;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double weight_decay = 0.01;  // AdamW only
  std::uint64_t seed = 0;
  double init_bias = 3.0;  // stage-0 logit of source nodes
  std::optional<std::int64_t> timeout_ms;
  std::optional<std::int64_t> sample_interval_ms;
};

/// Throws std::invalid_argument naming the first bad field.
void validate_config(const RunConfig& config);

/// Trainable logits, one row of `stages` entries per node in declaration order.
class ParamMatrix {
 public:
  ParamMatrix() = default;
  ParamMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  bool operator==(const ParamMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sources get logit init_bias on stage 0 and 0 elsewhere; every other row is
/// i.i.d. uniform in [-0.5, 0.5].
ParamMatrix init_params(const SchedGraph& g, const RunConfig& config, Rng& rng);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamOptions {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled (AdamW); 0 gives plain Adam
};

/// One bias-corrected Adam step. With weight_decay > 0 the decoupled shrink
/// w -= lr * wd * w is applied before the Adam update.
void adam_step(std::span<double> weights, std::span<const double> grad, AdamState& state, const AdamOptions& opt);

/// tau_start * (tau_end / tau_start)^(epoch / (epochs - 1)); tau_start when
/// epochs == 1.
double tau_schedule(int epoch, int epochs, double tau_start, double tau_end);

struct TrajectoryPoint {
  int epoch = 0;
  std::int64_t wall_ms = 0;
  double loss_total = 0.0;
  double loss_entropy = 0.0;  // ln L - H, the minimized memory term
  double loss_comm = 0.0;
  double peak_mem = 0.0;
  double comm_total = 0.0;
  double lp_objective = 0.0;
  double best_so_far = 0.0;
};

struct RunResult {
  Schedule best_schedule;
  double best_objective = 0.0;
  DiscreteMetrics best_metrics;
  Schedule final_schedule;  // the last epoch's sample
  std::vector<TrajectoryPoint> trajectory;
  RunConfig config;
};

/// Per-epoch view handed to a run observer.
struct EpochRecord {
  int epoch;
  double tau;
  const Schedule& schedule;
  const DiscreteMetrics& metrics;
  const LossBreakdown& loss;
};

using RunObserver = std::function<void(const EpochRecord&)>;

/// Gradient-descent scheduling. Each epoch builds a fresh tape, samples a
/// legal schedule in topological order, evaluates lambda * (ln L - H) + L_c on
/// the hard one-hots, backpropagates through the soft samples and takes one
/// optimizer step. The best schedule by discrete objective is kept. The
/// timeout is checked between epochs only.
///
/// Throws std::invalid_argument on a bad config and InfeasibleError when
/// config.latency < min_feasible_latency(g).
RunResult run(const SchedGraph& g, const RunConfig& config, const RunObserver& observer = {});

}  // namespace diffsched
