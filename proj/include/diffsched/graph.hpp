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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diffsched/error.hpp"

namespace diffsched {

struct Node {
  std::string id;
  double mem = 1.0;

  bool operator==(const Node&) const = default;
};

/// Dependency edge src -> dst. Encodes the difference constraint
/// stage(src) - stage(dst) <= sdc_c and carries a communication cost.
struct Edge {
  std::string src;
  std::string dst;
  double comm = 1.0;
  int sdc_c = 0;

  bool operator==(const Edge&) const = default;
};

/// Unvalidated graph as read from disk or assembled by hand.
struct RawGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  bool operator==(const RawGraph&) const = default;
};

/// Edge with resolved endpoint indices into SchedGraph::nodes().
struct IndexedEdge {
  std::size_t src;
  std::size_t dst;
  double comm;
  int sdc_c;
};

/// Stage assignment indexed by node position (declaration order).
struct Schedule {
  std::vector<int> stage;

  bool operator==(const Schedule&) const = default;
};

/// Returns every violation in `g`; an empty result means the graph is valid.
/// Checks unique ids, nonnegative finite weights, resolvable endpoints, no
/// self loops and acyclicity (Kahn).
std::vector<std::string> validate(const RawGraph& g);

/// Validated, immutable, indexed DAG. Safe to share read-only across threads.
class SchedGraph {
 public:
  SchedGraph() = default;

  /// Throws ValidationError listing all violations.
  static SchedGraph from_raw(RawGraph raw);

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const IndexedEdge> edges() const noexcept { return edges_; }
  const Node& node(std::size_t v) const { return nodes_.at(v); }

  /// Indices into edges() of the edges entering / leaving node v.
  std::span<const std::size_t> in_edges(std::size_t v) const { return in_.at(v); }
  std::span<const std::size_t> out_edges(std::size_t v) const { return out_.at(v); }
  bool is_source(std::size_t v) const { return in_.at(v).empty(); }

  /// Kahn order with declaration-order tie-break.
  std::span<const std::size_t> topo_order() const noexcept { return topo_; }

  std::optional<std::size_t> index_of(std::string_view id) const;

  RawGraph to_raw() const;
  double total_mem() const noexcept { return total_mem_; }
  double total_comm() const noexcept { return total_comm_; }

 private:
  std::vector<Node> nodes_;
  std::vector<IndexedEdge> edges_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> topo_;
  std::unordered_map<std::string, std::size_t> index_;
  double total_mem_ = 0.0;
  double total_comm_ = 0.0;
};

/// Node ids in deterministic topological order.
std::vector<std::string> topological_order(const SchedGraph& g);

/// Smallest stage each node can occupy in any legal schedule
/// (longest path under the difference constraints, clamped at 0).
std::vector<int> earliest_stages(const SchedGraph& g);

/// Largest stage each node can occupy with `latency` stages available.
/// Entries are negative when latency < min_feasible_latency(g).
std::vector<int> latest_stages(const SchedGraph& g, int latency);

/// Smallest number of stages that admits a legal schedule (at least 1).
int min_feasible_latency(const SchedGraph& g);

struct EdgeViolation {
  std::size_t edge;  // index into g.edges()
  std::string describe;
};

/// Empty when `s` is legal for `latency`: every stage in [0, latency-1] and
/// every edge satisfies stage(src) - stage(dst) <= sdc_c. Out-of-range stages
/// are reported with edge == SIZE_MAX.
std::vector<EdgeViolation> check_legal(const SchedGraph& g, const Schedule& s, int latency);

// I/O. The JSON format is
//   {"nodes":[{"id":..,"mem":..}], "edges":[{"src":..,"dst":..,"comm":..,"c":..}]}
// with mem and comm defaulting to 1.0 and c to 0. The edge-list format has one
// `src dst [comm] [c]` per line; `#` starts a comment; nodes are implied.

RawGraph parse_graph_json(std::string_view text);
RawGraph parse_edge_list(std::string_view text);

/// Parses JSON when the first non-blank character is '{', otherwise the edge
/// list. Validates. Throws ParseError or ValidationError.
SchedGraph load_graph(std::string_view text);
/// Throws IoError when the file cannot be opened.
SchedGraph load_graph_file(const std::string& path);

std::string save_graph(const SchedGraph& g);
std::string save_graph(const RawGraph& g);

}  // namespace diffsched
