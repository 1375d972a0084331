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

#include "diffsched/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diffsched {

double gumbel_from_uniform(double u) {
  u = std::clamp(u, 1e-12, 1.0 - 1e-12);
  return -std::log(-std::log(u));
}

GumbelNoise gumbel_noise(Rng& rng, int stages) {
  if (stages < 1) throw std::invalid_argument("gumbel_noise: stages must be >= 1");
  GumbelNoise g(static_cast<std::size_t>(stages));
  for (double& x : g) x = gumbel_from_uniform(rng.uniform());
  return g;
}

ConstraintMask mask_from_parent(std::span<const double> parent_onehot, int c, int stages) {
  if (parent_onehot.size() != static_cast<std::size_t>(stages))
    throw std::invalid_argument("mask_from_parent: one-hot length differs from stage count");
  const auto hot = std::find(parent_onehot.begin(), parent_onehot.end(), 1.0);
  if (hot == parent_onehot.end()) throw std::invalid_argument("mask_from_parent: parent is not one-hot");
  const int parent_stage = static_cast<int>(hot - parent_onehot.begin());

  // s_parent - s_child <= c  =>  s_child >= s_parent - c
  const int first = std::max(parent_stage - c, 0);
  if (first > stages - 1) {
    throw InfeasibleError("child of a node at stage " + std::to_string(parent_stage) + " with c = " +
                              std::to_string(c) + " needs stage " + std::to_string(first) + " >= " +
                              std::to_string(stages),
                          first + 1);
  }
  ConstraintMask mask(static_cast<std::size_t>(stages), 0.0);
  std::fill(mask.begin() + first, mask.end(), 1.0);
  return mask;
}

ConstraintMask combine_masks(std::span<const ConstraintMask> masks, int stages) {
  ConstraintMask out(static_cast<std::size_t>(stages), 1.0);
  for (const ConstraintMask& m : masks) {
    if (m.size() != out.size()) throw std::invalid_argument("combine_masks: length mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], m[i]);
  }
  if (std::none_of(out.begin(), out.end(), [](double b) { return b > 0.0; }))
    throw InfeasibleError("combined constraint mask is empty", stages + 1);
  return out;
}

StageSample constrained_sample(Tape& tape, DiffVector logits, const ConstraintMask& mask,
                               const GumbelNoise& noise, double tau) {
  if (mask.size() != logits.len || noise.size() != logits.len)
    throw std::invalid_argument("constrained_sample: length mismatch");

  std::size_t pick = logits.len;
  double best = -INFINITY;
  auto lv = tape.value(logits);
  for (std::size_t i = 0; i < logits.len; ++i) {
    if (mask[i] <= 0.0) continue;
    const double score = lv[i] + noise[i];
    if (!std::isfinite(score)) continue;
    if (pick == logits.len || score > best) {
      best = score;
      pick = i;
    }
  }
  if (pick == logits.len) throw std::domain_error("constrained_sample: no finite masked-in entry");

  StageSample s;
  DiffVector perturbed = tape.add(logits, tape.constant(noise));
  s.soft = tape.mul(tape.softmax(perturbed, tau), tape.constant(mask));
  s.hard = tape.straight_through_select(s.soft, pick);
  s.stage = static_cast<int>(pick);
  return s;
}

namespace {

template <typename NoiseFn>
std::vector<StageSample> sample_impl(Tape& tape, const SchedGraph& g, std::span<const DiffVector> logits,
                                     int stages, double tau, NoiseFn&& next_noise) {
  if (logits.size() != g.num_nodes()) throw std::invalid_argument("sample_schedule: one logit row per node");
  const auto latest = latest_stages(g, stages);
  std::vector<StageSample> out(g.num_nodes());
  std::vector<std::vector<double>> hard_values(g.num_nodes());
  std::vector<ConstraintMask> masks;

  for (std::size_t v : g.topo_order()) {
    if (latest[v] < 0) {
      throw InfeasibleError("latency " + std::to_string(stages) + " is below the minimum " +
                                std::to_string(min_feasible_latency(g)),
                            min_feasible_latency(g));
    }
    masks.clear();
    ConstraintMask cap(static_cast<std::size_t>(stages), 0.0);
    std::fill(cap.begin(), cap.begin() + latest[v] + 1, 1.0);
    masks.push_back(std::move(cap));
    for (std::size_t e : g.in_edges(v)) {
      const IndexedEdge& edge = g.edges()[e];
      masks.push_back(mask_from_parent(hard_values[edge.src], edge.sdc_c, stages));
    }
    const ConstraintMask mask = combine_masks(masks, stages);
    out[v] = constrained_sample(tape, logits[v], mask, next_noise(v), tau);
    auto hv = tape.value(out[v].hard);
    hard_values[v].assign(hv.begin(), hv.end());
  }
  return out;
}

}  // namespace

std::vector<StageSample> sample_schedule(Tape& tape, const SchedGraph& g, std::span<const DiffVector> logits,
                                         int stages, double tau, Rng& rng) {
  GumbelNoise scratch;
  return sample_impl(tape, g, logits, stages, tau, [&](std::size_t) -> const GumbelNoise& {
    scratch = gumbel_noise(rng, stages);
    return scratch;
  });
}

std::vector<StageSample> sample_schedule(Tape& tape, const SchedGraph& g, std::span<const DiffVector> logits,
                                         int stages, double tau, std::span<const GumbelNoise> noise) {
  if (noise.size() != g.num_nodes()) throw std::invalid_argument("sample_schedule: one noise row per node");
  return sample_impl(tape, g, logits, stages, tau,
                     [&](std::size_t v) -> const GumbelNoise& { return noise[v]; });
}

Schedule to_schedule(std::span<const StageSample> samples) {
  Schedule s;
  s.stage.reserve(samples.size());
  for (const StageSample& x : samples) s.stage.push_back(x.stage);
  return s;
}

}  // namespace diffsched
