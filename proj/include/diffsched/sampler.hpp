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

// Constrained Gumbel-Softmax sampling.
//
// Every node draws a stage from softmax((logits + g) / tau) restricted to the
// stages its already-sampled predecessors allow. For an edge i -> j with
// constant c the child must satisfy stage(j) >= stage(i) - c, which is the 0/1
// mask cumsum(one_hot(max(stage(i) - c, 0))). Masks of all incoming edges are
// ANDed; the result multiplies the soft sample, so a hard one-hot drawn from it
// is legal by construction. Masks are gradient constants.

#include <cstdint>
#include <span>
#include <vector>

#include "diffsched/autodiff.hpp"
#include "diffsched/graph.hpp"
#include "diffsched/rng.hpp"

namespace diffsched {

using ConstraintMask = std::vector<double>;  // entries are exactly 0.0 or 1.0
using GumbelNoise = std::vector<double>;

/// Standard Gumbel draws g = -log(-log(u)), u clamped to [1e-12, 1 - 1e-12].
GumbelNoise gumbel_noise(Rng& rng, int stages);

/// Closed-form transform used by gumbel_noise, exposed for testing.
double gumbel_from_uniform(double u);

/// Mask of stages the child may take given the parent's one-hot sample and
/// the edge constant. Throws InfeasibleError when no stage remains.
ConstraintMask mask_from_parent(std::span<const double> parent_onehot, int c, int stages);

/// Elementwise AND. An empty list yields all ones. Throws InfeasibleError when
/// the result is all zeros.
ConstraintMask combine_masks(std::span<const ConstraintMask> masks, int stages);

struct StageSample {
  DiffVector soft;  // softmax((logits + g) / tau) * mask
  DiffVector hard;  // straight-through one-hot of soft
  int stage = 0;
};

/// Samples one node. The hard one-hot sits at the masked-in argmax of
/// logits + g (equal to the argmax of soft, but well defined even when masked
/// probabilities underflow at small tau).
StageSample constrained_sample(Tape& tape, DiffVector logits, const ConstraintMask& mask,
                               const GumbelNoise& noise, double tau);

/// Per-node samples (indexed by node) drawn in topological order. `logits[v]`
/// must be a length-`stages` vector on `tape`. Besides the parent masks, each
/// node is capped at its latest legal stage so that negative constants can
/// never strand a descendant. Noise is drawn from `rng` in topological order.
std::vector<StageSample> sample_schedule(Tape& tape, const SchedGraph& g, std::span<const DiffVector> logits,
                                         int stages, double tau, Rng& rng);

/// Same as above with caller-provided noise (one vector per node, by index).
std::vector<StageSample> sample_schedule(Tape& tape, const SchedGraph& g, std::span<const DiffVector> logits,
                                         int stages, double tau, std::span<const GumbelNoise> noise);

Schedule to_schedule(std::span<const StageSample> samples);

}  // namespace diffsched
