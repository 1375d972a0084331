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

#include "diffsched/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "diffsched/rng.hpp"

namespace diffsched {

namespace {

bool valid_range(const std::pair<double, double>& r) {
  return std::isfinite(r.first) && std::isfinite(r.second) && r.first >= 0.0 && r.first <= r.second;
}

double draw(Rng& rng, const std::pair<double, double>& r) {
  const double u = rng.uniform();
  return r.first == r.second ? r.first : r.first + (r.second - r.first) * u;
}

}  // namespace

void validate_spec(const GenSpec& spec) {
  if (spec.n_nodes < 0) throw std::invalid_argument("gen: n_nodes must be >= 0");
  if (spec.n_nodes == 0 && spec.depth != 0) throw std::invalid_argument("gen: empty graph needs depth 0");
  if (spec.n_nodes > 0 && (spec.depth < 1 || spec.depth > spec.n_nodes))
    throw std::invalid_argument("gen: depth must lie in [1, n_nodes]");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw std::invalid_argument("gen: density must lie in (0, 1]");
  if (!valid_range(spec.mem_range)) throw std::invalid_argument("gen: bad mem range");
  if (!valid_range(spec.comm_range)) throw std::invalid_argument("gen: bad comm range");
}

SchedGraph gen_random_workload(const GenSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);
  const auto n = static_cast<std::size_t>(spec.n_nodes);
  const auto depth = static_cast<std::size_t>(spec.depth);

  // layer_start[l] .. layer_start[l+1] hold the node indices of layer l.
  std::vector<std::size_t> layer_start(depth + 1, 0);
  for (std::size_t l = 0; l < depth; ++l) layer_start[l + 1] = layer_start[l] + n / depth + (l < n % depth ? 1 : 0);
  std::vector<std::size_t> layer_of(n);
  for (std::size_t l = 0; l < depth; ++l)
    for (std::size_t v = layer_start[l]; v < layer_start[l + 1]; ++v) layer_of[v] = l;

  RawGraph raw;
  raw.nodes.reserve(n);
  for (std::size_t v = 0; v < n; ++v) raw.nodes.push_back(Node{"n" + std::to_string(v), draw(rng, spec.mem_range)});

  std::vector<std::size_t> forced(n, n);
  for (std::size_t v = layer_start.size() > 1 ? layer_start[1] : n; v < n; ++v) {
    const std::size_t l = layer_of[v];
    const std::size_t lo = layer_start[l - 1];
    forced[v] = lo + static_cast<std::size_t>(rng.below(layer_start[l] - lo));
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (forced[v] != n)
      raw.edges.push_back(Edge{raw.nodes[forced[v]].id, raw.nodes[v].id, draw(rng, spec.comm_range), 0});
  }
  // Optional edges: one uniform and one weight draw per ordered layer pair so
  // the random stream does not depend on the density.
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = layer_start[layer_of[u] + 1]; v < n; ++v) {
      const double coin = rng.uniform();
      const double comm = draw(rng, spec.comm_range);
      if (forced[v] == u) continue;
      const double dist = static_cast<double>(layer_of[v] - layer_of[u]);
      if (coin < spec.density * std::pow(0.5, dist - 1.0)) raw.edges.push_back(Edge{raw.nodes[u].id, raw.nodes[v].id, comm, 0});
    }
  }
  return SchedGraph::from_raw(std::move(raw));
}

ShapeStats shape_stats(const SchedGraph& g) {
  ShapeStats s;
  s.n_nodes = g.num_nodes();
  s.n_edges = g.num_edges();
  if (s.n_nodes == 0) return s;
  std::vector<std::size_t> chain(g.num_nodes(), 1);
  for (std::size_t v : g.topo_order()) {
    for (std::size_t e : g.in_edges(v)) chain[v] = std::max(chain[v], chain[g.edges()[e].src] + 1);
    s.depth = std::max(s.depth, chain[v]);
  }
  s.avg_out_degree = static_cast<double>(s.n_edges) / static_cast<double>(s.n_nodes);
  return s;
}

}  // namespace diffsched
