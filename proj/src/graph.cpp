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

#include "diffsched/graph.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace diffsched {

namespace {

std::string join_violations(const std::string& heading, const std::vector<std::string>& v) {
  std::string out = heading + ":";
  for (const auto& s : v) {
    out += "\n  ";
    out += s;
  }
  return out;
}

// Kahn's algorithm. Ready nodes are kept in a min-heap on declaration index so
// ties resolve by declaration order. Returns fewer than n entries on a cycle.
std::vector<std::size_t> kahn(std::size_t n, const std::vector<std::vector<std::size_t>>& succ) {
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& list : succ)
    for (std::size_t w : list) ++indeg[w];

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);

  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t w : succ[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  return order;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations, const std::string& heading)
    : std::runtime_error(join_violations(heading, violations)), violations_(std::move(violations)) {}

std::vector<std::string> validate(const RawGraph& g) {
  std::vector<std::string> out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const Node& n = g.nodes[i];
    if (n.id.empty()) out.push_back("empty id at node " + std::to_string(i));
    if (!index.emplace(n.id, i).second) out.push_back("duplicate id \"" + n.id + "\"");
    if (!std::isfinite(n.mem) || n.mem < 0.0)
      out.push_back("negative weight: node \"" + n.id + "\" mem");
  }

  std::vector<std::vector<std::size_t>> succ(g.nodes.size());
  bool endpoints_ok = true;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& edge = g.edges[e];
    const std::string tag = "edge " + std::to_string(e) + " (" + edge.src + " -> " + edge.dst + ")";
    auto s = index.find(edge.src);
    auto d = index.find(edge.dst);
    if (s == index.end()) {
      out.push_back(tag + ": unknown src");
      endpoints_ok = false;
    }
    if (d == index.end()) {
      out.push_back(tag + ": unknown dst");
      endpoints_ok = false;
    }
    if (edge.src == edge.dst) {
      out.push_back(tag + ": self loop");
      endpoints_ok = false;
    }
    if (!std::isfinite(edge.comm) || edge.comm < 0.0) out.push_back("negative weight: " + tag + " comm");
    if (s != index.end() && d != index.end() && edge.src != edge.dst) succ[s->second].push_back(d->second);
  }

  // Cycle detection only makes sense once ids are unique and endpoints resolve.
  if (endpoints_ok && index.size() == g.nodes.size()) {
    if (kahn(g.nodes.size(), succ).size() != g.nodes.size()) out.push_back("graph contains a cycle");
  }
  return out;
}

SchedGraph SchedGraph::from_raw(RawGraph raw) {
  if (auto violations = validate(raw); !violations.empty()) throw ValidationError(std::move(violations));

  SchedGraph g;
  g.nodes_ = std::move(raw.nodes);
  const std::size_t n = g.nodes_.size();
  g.in_.resize(n);
  g.out_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.index_.emplace(g.nodes_[i].id, i);
    g.total_mem_ += g.nodes_[i].mem;
  }
  g.edges_.reserve(raw.edges.size());
  std::vector<std::vector<std::size_t>> succ(n);
  for (const Edge& e : raw.edges) {
    const std::size_t s = g.index_.at(e.src);
    const std::size_t d = g.index_.at(e.dst);
    g.out_[s].push_back(g.edges_.size());
    g.in_[d].push_back(g.edges_.size());
    g.edges_.push_back(IndexedEdge{s, d, e.comm, e.sdc_c});
    g.total_comm_ += e.comm;
    succ[s].push_back(d);
  }
  g.topo_ = kahn(n, succ);
  return g;
}

std::optional<std::size_t> SchedGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RawGraph SchedGraph::to_raw() const {
  RawGraph raw;
  raw.nodes = nodes_;
  raw.edges.reserve(edges_.size());
  for (const IndexedEdge& e : edges_)
    raw.edges.push_back(Edge{nodes_[e.src].id, nodes_[e.dst].id, e.comm, e.sdc_c});
  return raw;
}

std::vector<std::string> topological_order(const SchedGraph& g) {
  std::vector<std::string> ids;
  ids.reserve(g.num_nodes());
  for (std::size_t v : g.topo_order()) ids.push_back(g.node(v).id);
  return ids;
}

std::vector<int> earliest_stages(const SchedGraph& g) {
  std::vector<int> lp(g.num_nodes(), 0);
  for (std::size_t v : g.topo_order()) {
    for (std::size_t e : g.in_edges(v)) {
      const IndexedEdge& edge = g.edges()[e];
      // stage(dst) >= stage(src) - c
      lp[v] = std::max(lp[v], lp[edge.src] - edge.sdc_c);
    }
  }
  return lp;
}

std::vector<int> latest_stages(const SchedGraph& g, int latency) {
  std::vector<int> late(g.num_nodes(), latency - 1);
  auto order = g.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    for (std::size_t e : g.out_edges(v)) {
      const IndexedEdge& edge = g.edges()[e];
      // stage(src) <= stage(dst) + c
      late[v] = std::min(late[v], late[edge.dst] + edge.sdc_c);
    }
  }
  return late;
}

int min_feasible_latency(const SchedGraph& g) {
  const auto lp = earliest_stages(g);
  int deepest = 0;
  for (int s : lp) deepest = std::max(deepest, s);
  return deepest + 1;
}

std::vector<EdgeViolation> check_legal(const SchedGraph& g, const Schedule& s, int latency) {
  std::vector<EdgeViolation> out;
  if (s.stage.size() != g.num_nodes()) {
    out.push_back({SIZE_MAX, "schedule has " + std::to_string(s.stage.size()) + " entries for " +
                                 std::to_string(g.num_nodes()) + " nodes"});
    return out;
  }
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    if (s.stage[v] < 0 || s.stage[v] >= latency) {
      out.push_back({SIZE_MAX, "node " + g.node(v).id + " stage " + std::to_string(s.stage[v]) +
                                   " outside [0, " + std::to_string(latency - 1) + "]"});
    }
  }
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const IndexedEdge& edge = g.edges()[e];
    if (s.stage[edge.src] - s.stage[edge.dst] > edge.sdc_c) {
      std::ostringstream msg;
      msg << "edge " << g.node(edge.src).id << " -> " << g.node(edge.dst).id << ": "
          << s.stage[edge.src] << " - " << s.stage[edge.dst] << " > " << edge.sdc_c;
      out.push_back({e, msg.str()});
    }
  }
  return out;
}

}  // namespace diffsched
