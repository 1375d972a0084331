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

// Test-side reference implementations. Nothing here calls into the library's
// algorithms; the helpers work on plain vectors so that they can serve as
// independent oracles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "diffsched/graph.hpp"

namespace oracle {

struct PlainEdge {
  int src, dst;
  double comm;
  int c;
};

struct PlainGraph {
  std::vector<double> mem;
  std::vector<PlainEdge> edges;
};

inline PlainGraph plain(const diffsched::SchedGraph& g) {
  PlainGraph p;
  for (const auto& n : g.nodes()) p.mem.push_back(n.mem);
  for (const auto& e : g.edges())
    p.edges.push_back({static_cast<int>(e.src), static_cast<int>(e.dst), e.comm, e.sdc_c});
  return p;
}

struct DagOptions {
  int n = 6;
  double edge_prob = 0.4;
  std::vector<double> comm_choices{1.0, 2.0, 3.0};
  std::vector<int> c_choices{0};
  bool unit_mem = true;
};

/// Random DAG: an edge i -> j (i < j in a shuffled order) with probability
/// edge_prob. Node ids are "v<k>" in declaration order.
inline diffsched::SchedGraph random_dag(std::mt19937_64& rng, const DagOptions& opt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> perm(static_cast<std::size_t>(opt.n));
  for (int i = 0; i < opt.n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  diffsched::RawGraph raw;
  for (int i = 0; i < opt.n; ++i)
    raw.nodes.push_back({"v" + std::to_string(i), opt.unit_mem ? 1.0 : std::floor(u(rng) * 4.0)});
  for (int a = 0; a < opt.n; ++a)
    for (int b = a + 1; b < opt.n; ++b)
      if (u(rng) < opt.edge_prob) {
        const double comm = opt.comm_choices[rng() % opt.comm_choices.size()];
        const int c = opt.c_choices[rng() % opt.c_choices.size()];
        raw.edges.push_back({"v" + std::to_string(perm[static_cast<std::size_t>(a)]),
                             "v" + std::to_string(perm[static_cast<std::size_t>(b)]), comm, c});
      }
  return diffsched::SchedGraph::from_raw(std::move(raw));
}

inline bool legal(const PlainGraph& g, const std::vector<int>& s, int L) {
  for (int x : s)
    if (x < 0 || x >= L) return false;
  for (const auto& e : g.edges)
    if (s[static_cast<std::size_t>(e.src)] - s[static_cast<std::size_t>(e.dst)] > e.c) return false;
  return true;
}

struct Metrics {
  double peak = 0.0;
  std::vector<double> boundary;
  double comm = 0.0;
  double objective = 0.0;
};

/// Direct evaluation: stage sums and, per boundary, the cost of every edge
/// whose source is at or before it and whose destination is after it.
inline Metrics metrics(const PlainGraph& g, const std::vector<int>& s, int L, double ratio) {
  Metrics m;
  std::vector<double> load(static_cast<std::size_t>(L), 0.0);
  for (std::size_t v = 0; v < s.size(); ++v) load[static_cast<std::size_t>(s[v])] += g.mem[v];
  m.peak = *std::max_element(load.begin(), load.end());
  m.boundary.assign(static_cast<std::size_t>(std::max(L - 1, 0)), 0.0);
  for (int i = 0; i + 1 < L; ++i)
    for (const auto& e : g.edges)
      if (s[static_cast<std::size_t>(e.src)] <= i && s[static_cast<std::size_t>(e.dst)] >= i + 1)
        m.boundary[static_cast<std::size_t>(i)] += e.comm;
  for (double b : m.boundary) m.comm += b;
  m.objective = m.comm + ratio * m.peak;
  return m;
}

/// Calls f on every one of the L^n assignments, in lexicographic order.
inline void enumerate(std::size_t n, int L, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> s(n, 0);
  for (;;) {
    f(s);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++s[k] < L) break;
      s[k] = 0;
      if (k == 0) return;
    }
    if (n == 0) return;
  }
}

struct Optimum {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<int> schedule;  // lexicographically smallest minimizer
  std::size_t legal_count = 0;
};

inline Optimum naive_optimum(const PlainGraph& g, int L, double ratio) {
  Optimum best;
  enumerate(g.mem.size(), L, [&](const std::vector<int>& s) {
    if (!legal(g, s, L)) return;
    ++best.legal_count;
    const double obj = metrics(g, s, L, ratio).objective;
    if (!best.feasible || obj < best.objective - 1e-9) {
      best.feasible = true;
      best.objective = obj;
      best.schedule = s;
    }
  });
  return best;
}

/// A topological order computed here (plain Kahn, FIFO).
inline std::vector<int> kahn_order(const diffsched::SchedGraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<int> indeg(n, 0), order;
  for (const auto& e : g.edges()) ++indeg[e.dst];
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) order.push_back(static_cast<int>(v));
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t e : g.out_edges(static_cast<std::size_t>(order[k])))
      if (--indeg[g.edges()[e].dst] == 0) order.push_back(static_cast<int>(g.edges()[e].dst));
  return order;
}

/// Latest legal stage of every node by a backward pass.
inline std::vector<int> latest_ref(const diffsched::SchedGraph& g, int L) {
  const auto order = kahn_order(g);
  std::vector<int> latest(g.num_nodes(), L - 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (std::size_t e : g.out_edges(static_cast<std::size_t>(*it))) {
      const auto& edge = g.edges()[e];
      latest[static_cast<std::size_t>(*it)] = std::min(latest[static_cast<std::size_t>(*it)], latest[edge.dst] + edge.sdc_c);
    }
  return latest;
}

/// Uniformly chosen stage per node within the window left by its placed
/// predecessors and by the latest-stage bound, in topological order.
inline std::vector<int> random_legal(const diffsched::SchedGraph& g, int L, std::mt19937_64& rng) {
  const auto order = kahn_order(g);
  const auto latest = latest_ref(g, L);
  std::vector<int> s(g.num_nodes(), 0);
  for (int v : order) {
    int lo = 0;
    for (std::size_t e : g.in_edges(static_cast<std::size_t>(v))) {
      const auto& edge = g.edges()[e];
      lo = std::max(lo, s[edge.src] - edge.sdc_c);
    }
    const int hi = latest[static_cast<std::size_t>(v)];
    s[static_cast<std::size_t>(v)] = lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
  }
  return s;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
