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

#include "diffsched/engine.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "diffsched/sampler.hpp"

namespace diffsched {

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid config: " + msg); };
  if (c.latency < 1) fail("latency must be >= 1");
  if (c.epochs < 1) fail("epochs must be >= 1");
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) fail("lr must be positive");
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) fail("lambda must be >= 0");
  if (!(c.ratio >= 0.0) || !std::isfinite(c.ratio)) fail("ratio must be >= 0");
  if (!(c.tau_end > 0.0)) fail("tau_end must be positive");
  if (!(c.tau_start >= c.tau_end) || !std::isfinite(c.tau_start)) fail("tau_start must be >= tau_end");
  if (!(c.weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!std::isfinite(c.init_bias)) fail("init_bias must be finite");
  if (c.timeout_ms && *c.timeout_ms < 0) fail("timeout_ms must be >= 0");
  if (c.sample_interval_ms && *c.sample_interval_ms <= 0) fail("sample_interval_ms must be positive");
}

ParamMatrix init_params(const SchedGraph& g, const RunConfig& config, Rng& rng) {
  ParamMatrix w(g.num_nodes(), static_cast<std::size_t>(config.latency));
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    auto row = w.row(v);
    if (g.is_source(v)) {
      row[0] = config.init_bias;
    } else {
      for (double& x : row) x = rng.uniform(-0.5, 0.5);
    }
  }
  return w;
}

void adam_step(std::span<double> weights, std::span<const double> grad, AdamState& state, const AdamOptions& opt) {
  if (grad.size() != weights.size() || state.m.size() != weights.size() || state.v.size() != weights.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (opt.weight_decay > 0.0) weights[i] -= opt.lr * opt.weight_decay * weights[i];
    state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * grad[i];
    state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    weights[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
}

double tau_schedule(int epoch, int epochs, double tau_start, double tau_end) {
  if (epochs <= 1) return tau_start;
  const double frac = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return tau_start * std::pow(tau_end / tau_start, frac);
}

RunResult run(const SchedGraph& g, const RunConfig& config, const RunObserver& observer) {
  validate_config(config);
  const int min_latency = min_feasible_latency(g);
  if (config.latency < min_latency) {
    throw InfeasibleError("latency " + std::to_string(config.latency) + " is below the minimum feasible latency " +
                              std::to_string(min_latency),
                          min_latency);
  }

  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  const int stages = config.latency;
  const std::size_t n = g.num_nodes();

  Rng rng(config.seed);
  ParamMatrix weights = init_params(g, config, rng);
  AdamState adam(weights.flat().size());
  AdamOptions adam_opts;
  adam_opts.lr = config.lr;
  adam_opts.weight_decay = config.optimizer == OptimizerKind::AdamW ? config.weight_decay : 0.0;

  std::vector<double> mem(n);
  for (std::size_t v = 0; v < n; ++v) mem[v] = g.node(v).mem;
  const bool has_mem = g.total_mem() > 0.0;

  RunResult result;
  result.config = config;
  result.trajectory.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<double> flat_grad(weights.flat().size(), 0.0);
  std::vector<DiffVector> logits(n);
  std::vector<DiffVector> hard(n);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double tau = tau_schedule(epoch, config.epochs, config.tau_start, config.tau_end);

    Tape tape;
    for (std::size_t v = 0; v < n; ++v) logits[v] = tape.param(weights.row(v));
    const auto samples = sample_schedule(tape, g, logits, stages, tau, rng);
    for (std::size_t v = 0; v < n; ++v) hard[v] = samples[v].hard;

    DiffVector memory_term = has_mem ? entropy_gap(tape, entropy_loss(tape, hard, mem, stages), stages)
                                     : tape.scalar(0.0);
    DiffVector comm_term = comm_loss(tape, hard, g, stages);
    DiffVector total = total_loss(tape, memory_term, comm_term, config.lambda);
    const LossBreakdown loss =
        total_loss(tape.scalar_value(memory_term), tape.scalar_value(comm_term), config.lambda);

    const GradientMap grads = tape.backward(total);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& gv = grads.at(logits[v].node);
      std::copy(gv.begin(), gv.end(), flat_grad.begin() + static_cast<std::ptrdiff_t>(v * weights.cols()));
    }

    Schedule schedule = to_schedule(samples);
    DiscreteMetrics metrics = discrete_metrics(g, schedule, stages, config.ratio);
    if (epoch == 0 || metrics.lp_objective < result.best_objective) {
      result.best_objective = metrics.lp_objective;
      result.best_schedule = schedule;
      result.best_metrics = metrics;
    }

    TrajectoryPoint p;
    p.epoch = epoch;
    p.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - started).count();
    p.loss_total = loss.total;
    p.loss_entropy = loss.entropy;
    p.loss_comm = loss.comm;
    p.peak_mem = metrics.peak_mem;
    p.comm_total = metrics.comm_total;
    p.lp_objective = metrics.lp_objective;
    p.best_so_far = result.best_objective;
    result.trajectory.push_back(p);

    if (observer) observer(EpochRecord{epoch, tau, schedule, metrics, loss});

    adam_step(weights.flat(), flat_grad, adam, adam_opts);
    result.final_schedule = std::move(schedule);

    if (config.timeout_ms && std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - started).count() >=
                                 *config.timeout_ms)
      break;
  }
  return result;
}

}  // namespace diffsched
