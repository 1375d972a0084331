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

#include <stdexcept>
#include <doctest.h>

#include <cstdio>

#include "diffsched/baselines.hpp"
#include "diffsched/error.hpp"
#include "support/oracles.hpp"

using namespace diffsched;

namespace {

SchedGraph chain(int n, int c) {
  RawGraph raw;
  for (int i = 0; i < n; ++i) raw.nodes.push_back({"n" + std::to_string(i), 1.0});
  for (int i = 0; i + 1 < n; ++i) raw.edges.push_back({"n" + std::to_string(i), "n" + std::to_string(i + 1), 1.0, c});
  return SchedGraph::from_raw(raw);
}

}  // namespace

TEST_CASE("brute_force examples") {
  const auto ab = brute_force(chain(2, 0), 2, 10.0);
  CHECK(ab.schedule.stage == std::vector<int>{0, 1});
  CHECK(ab.objective == 11.0);

  RawGraph one;
  one.nodes = {{"x", 2.0}};
  const auto single = brute_force(SchedGraph::from_raw(one), 5, 10.0);
  CHECK(single.objective == 20.0);
  CHECK(single.schedule.stage == std::vector<int>{0});

  RawGraph pair;
  pair.nodes = {{"p", 1.0}, {"q", 1.0}};
  const auto split = brute_force(SchedGraph::from_raw(pair), 2, 10.0);
  CHECK(split.objective == 10.0);
  CHECK(split.metrics.peak_mem == 1.0);
  CHECK(split.schedule.stage == std::vector<int>{0, 1});
}

TEST_CASE("brute_force errors") {
  CHECK_THROWS_AS(brute_force(chain(3, -1), 2, 10.0), InfeasibleError);
  CHECK_THROWS_AS(brute_force(chain(24, 0), 3, 10.0), std::length_error);
}

TEST_CASE("brute_force reports improving incumbents") {
  std::vector<double> seen;
  const auto r = brute_force(chain(5, 0), 3, 10.0, [&](const Schedule&, double obj) { seen.push_back(obj); });
  REQUIRE_FALSE(seen.empty());
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] < seen[i - 1]);
  CHECK(seen.back() == r.objective);
}

TEST_CASE("property: oracle agrees exactly with a naive enumerator (|V| <= 6, L <= 3)") {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    oracle::DagOptions opt;
    opt.n = 1 + static_cast<int>(rng() % 6);
    opt.edge_prob = 0.45;
    opt.unit_mem = (k % 2) == 0;
    opt.c_choices = {-1, 0, 0, 1};
    const SchedGraph g = oracle::random_dag(rng, opt);
    const int L = 1 + static_cast<int>(rng() % 3);
    const double ratio = (k % 3 == 0) ? 1.0 : 10.0;
    const auto ref = oracle::naive_optimum(oracle::plain(g), L, ratio);
    if (!ref.feasible) {
      CHECK_THROWS_AS(brute_force(g, L, ratio), InfeasibleError);
      continue;
    }
    const auto got = brute_force(g, L, ratio);
    CHECK(got.objective == ref.objective);
    CHECK(got.schedule.stage == ref.schedule);
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("asap / alap") {
  CHECK(asap(chain(4, 0), 3).stage == std::vector<int>{0, 0, 0, 0});
  CHECK(alap(chain(4, 0), 3).stage == std::vector<int>{2, 2, 2, 2});
  CHECK(asap(chain(4, -1), 5).stage == std::vector<int>{0, 1, 2, 3});
  CHECK(alap(chain(4, -1), 5).stage == std::vector<int>{1, 2, 3, 4});
  CHECK_THROWS_AS(asap(chain(4, -1), 3), InfeasibleError);
  CHECK_THROWS_AS(alap(chain(4, -1), 3), InfeasibleError);
}

TEST_CASE("greedy_balance examples") {
  const auto s = greedy_balance(chain(2, 0), 2, 10.0);
  CHECK(s.stage == std::vector<int>{0, 1});
  CHECK(discrete_metrics(chain(2, 0), s, 2, 10.0).lp_objective == 11.0);
  RawGraph one;
  one.nodes = {{"x", 1.0}};
  CHECK(greedy_balance(SchedGraph::from_raw(one), 3, 10.0).stage == std::vector<int>{0});
  CHECK_THROWS_AS(greedy_balance(chain(3, -1), 2, 10.0), InfeasibleError);
}

TEST_CASE("property: heuristics are legal and bracketed; greedy vs asap report") {
  std::mt19937_64 rng(41);
  int greedy_no_worse = 0;
  for (int k = 0; k < 100; ++k) {
    oracle::DagOptions opt;
    opt.n = 2 + static_cast<int>(rng() % 25);
    opt.edge_prob = 0.2;
    opt.c_choices = {-1, 0, 0, 0, 1};
    const SchedGraph g = oracle::random_dag(rng, opt);
    const int L = min_feasible_latency(g) + static_cast<int>(rng() % 4);
    const auto p = oracle::plain(g);
    const auto a = asap(g, L), z = alap(g, L), gr = greedy_balance(g, L, 10.0);
    CHECK(oracle::legal(p, a.stage, L));
    CHECK(oracle::legal(p, z.stage, L));
    CHECK(oracle::legal(p, gr.stage, L));
    for (std::size_t v = 0; v < g.num_nodes(); ++v) CHECK(a.stage[v] <= z.stage[v]);
    if (oracle::metrics(p, gr.stage, L, 10.0).objective <= oracle::metrics(p, a.stage, L, 10.0).objective + 1e-9)
      ++greedy_no_worse;
  }
  MESSAGE("greedy no worse than asap on " << greedy_no_worse << "/100 instances");
}
