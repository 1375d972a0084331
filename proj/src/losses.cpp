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

#include "diffsched/losses.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace diffsched {

DiffVector entropy_loss(Tape& tape, std::span<const DiffVector> hard, std::span<const double> mem, int stages) {
  if (hard.size() != mem.size()) throw std::invalid_argument("entropy_loss: one memory weight per node");
  double total = 0.0;
  for (double m : mem) total += m;
  if (!(total > 0.0)) throw std::domain_error("entropy_loss: total memory is zero");

  const std::vector<double> zeros(static_cast<std::size_t>(stages), 0.0);
  DiffVector stage_mem = tape.constant(zeros);
  for (std::size_t v = 0; v < hard.size(); ++v) {
    if (hard[v].len != zeros.size()) throw std::invalid_argument("entropy_loss: sample length differs from stages");
    stage_mem = tape.add(stage_mem, mem[v] == 1.0 ? hard[v] : tape.mul(hard[v], tape.scalar(mem[v])));
  }
  DiffVector share = tape.div(stage_mem, tape.scalar(total));
  // Empty stages have share exactly 0; the floor makes 0 * log(0) evaluate to 0.
  DiffVector plogp = tape.mul(share, tape.clamped_log(share, kLogFloor));
  return tape.mul(tape.scalar(-1.0), tape.sum(plogp));
}

DiffVector comm_loss(Tape& tape, std::span<const DiffVector> hard, const SchedGraph& g, int stages) {
  if (hard.size() != g.num_nodes()) throw std::invalid_argument("comm_loss: one sample per node");
  const double total_comm = g.total_comm();
  if (g.num_edges() == 0 || total_comm == 0.0) return tape.scalar(0.0);

  std::vector<std::optional<DiffVector>> upto(g.num_nodes());   // cumsum(s)
  std::vector<std::optional<DiffVector>> after(g.num_nodes());  // 1 - cumsum(s)
  DiffVector one = tape.scalar(1.0);
  DiffVector minus_one = tape.scalar(-1.0);
  auto cum = [&](std::size_t v) {
    if (!upto[v]) upto[v] = tape.cumsum(hard[v]);
    return *upto[v];
  };

  // The last cumsum entry is excluded by a zero weight: boundaries are 0..L-2.
  std::vector<double> weight(static_cast<std::size_t>(stages), 0.0);
  std::optional<DiffVector> acc;
  for (const IndexedEdge& e : g.edges()) {
    if (e.comm == 0.0) continue;
    if (!after[e.dst]) after[e.dst] = tape.add(one, tape.mul(minus_one, cum(e.dst)));
    std::fill(weight.begin(), weight.end() - 1, e.comm);
    DiffVector crossing = tape.dot(tape.mul(cum(e.src), *after[e.dst]), weight);
    acc = acc ? tape.add(*acc, crossing) : crossing;
  }
  return tape.div(*acc, tape.scalar(total_comm));
}

LossBreakdown total_loss(double entropy, double comm, double lambda) {
  return LossBreakdown{lambda * entropy + comm, entropy, comm, lambda};
}

DiffVector total_loss(Tape& tape, DiffVector entropy, DiffVector comm, double lambda) {
  return tape.add(tape.mul(tape.scalar(lambda), entropy), comm);
}

DiffVector entropy_gap(Tape& tape, DiffVector entropy, int stages) {
  return tape.add(tape.scalar(std::log(static_cast<double>(stages))), tape.mul(tape.scalar(-1.0), entropy));
}

DiscreteMetrics discrete_metrics(const SchedGraph& g, const Schedule& s, int stages, double ratio) {
  if (auto bad = check_legal(g, s, stages); !bad.empty()) {
    std::vector<std::string> msgs;
    for (auto& b : bad) msgs.push_back(std::move(b.describe));
    throw ValidationError(std::move(msgs), "illegal schedule");
  }
  DiscreteMetrics m;
  m.stage_mem.assign(static_cast<std::size_t>(stages), 0.0);
  m.boundary_comm.assign(static_cast<std::size_t>(std::max(stages - 1, 0)), 0.0);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) m.stage_mem[static_cast<std::size_t>(s.stage[v])] += g.node(v).mem;
  for (const IndexedEdge& e : g.edges()) {
    // The edge crosses boundary i when stage(src) <= i < stage(dst).
    for (int i = s.stage[e.src]; i < s.stage[e.dst]; ++i) m.boundary_comm[static_cast<std::size_t>(i)] += e.comm;
  }
  for (double x : m.stage_mem) m.peak_mem = std::max(m.peak_mem, x);
  for (double x : m.boundary_comm) m.comm_total += x;
  m.lp_objective = m.comm_total + ratio * m.peak_mem;
  return m;
}

double schedule_entropy(const SchedGraph& g, const Schedule& s, int stages) {
  std::vector<double> stage_mem(static_cast<std::size_t>(stages), 0.0);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) stage_mem.at(static_cast<std::size_t>(s.stage[v])) += g.node(v).mem;
  const double total = g.total_mem();
  if (!(total > 0.0)) throw std::domain_error("schedule_entropy: total memory is zero");
  double h = 0.0;
  for (double n : stage_mem) {
    const double p = n / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::vector<double> normalized_progress(std::span<const double> objectives) {
  if (objectives.empty()) throw std::invalid_argument("normalized_progress: empty trajectory");
  const double first = objectives.front();
  if (!(first > 0.0)) throw std::invalid_argument("normalized_progress: first objective must be positive");
  std::vector<double> out;
  out.reserve(objectives.size());
  double best = first;
  for (double x : objectives) {
    best = std::min(best, x);
    out.push_back(best / first);
  }
  return out;
}

}  // namespace diffsched
