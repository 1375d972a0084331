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

#include <random>

#include "diffsched/generator.hpp"

using namespace diffsched;

TEST_CASE("rw1 shape") {
  GenSpec spec;
  spec.n_nodes = 949;
  spec.depth = 15;
  spec.density = 0.02;
  spec.seed = 1;
  const SchedGraph g = gen_random_workload(spec);
  const ShapeStats s = shape_stats(g);
  CHECK(s.n_nodes == 949);
  CHECK(s.depth == 15);
  CHECK(s.n_edges >= 949 - 64);
  for (const auto& e : g.edges()) {
    CHECK(e.sdc_c == 0);
    CHECK(e.comm >= 1.0);
    CHECK(e.comm <= 4.0);
  }
  for (const auto& n : g.nodes()) CHECK(n.mem == 1.0);
}

TEST_CASE("depth equal to node count gives a chain") {
  GenSpec spec;
  spec.n_nodes = 5;
  spec.depth = 5;
  spec.density = 1e-9;
  const SchedGraph g = gen_random_workload(spec);
  CHECK(g.num_edges() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(g.edges()[k].src == k);
    CHECK(g.edges()[k].dst == k + 1);
  }
  CHECK(shape_stats(g).depth == 5);
}

TEST_CASE("determinism") {
  GenSpec spec;
  spec.n_nodes = 200;
  spec.depth = 9;
  spec.seed = 12;
  spec.mem_range = {0.5, 3.0};
  CHECK(save_graph(gen_random_workload(spec)) == save_graph(gen_random_workload(spec)));
  GenSpec other = spec;
  other.seed = 13;
  CHECK(save_graph(gen_random_workload(spec)) != save_graph(gen_random_workload(other)));
}

TEST_CASE("shape_stats") {
  const SchedGraph chain = load_graph("a b\nb c\n");
  const ShapeStats s = shape_stats(chain);
  CHECK(s.depth == 3);
  CHECK(s.n_edges == 2);
  CHECK(s.avg_out_degree == doctest::Approx(2.0 / 3.0));
  const ShapeStats e = shape_stats(SchedGraph{});
  CHECK(e.n_nodes == 0);
  CHECK(e.n_edges == 0);
  CHECK(e.depth == 0);
  CHECK(e.avg_out_degree == 0.0);
}

TEST_CASE("invalid specs") {
  auto bad = [](auto mutate) {
    GenSpec s;
    mutate(s);
    CHECK_THROWS_AS(gen_random_workload(s), std::invalid_argument);
  };
  bad([](GenSpec& s) { s.depth = s.n_nodes + 1; });
  bad([](GenSpec& s) { s.depth = 0; });
  bad([](GenSpec& s) { s.density = 0.0; });
  bad([](GenSpec& s) { s.density = 1.5; });
  bad([](GenSpec& s) { s.comm_range = {3.0, 1.0}; });
  bad([](GenSpec& s) { s.mem_range = {-1.0, 1.0}; });
}

TEST_CASE("property: fuzzed specs validate, hit their depth, connect every later node") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 200; ++k) {
    GenSpec spec;
    spec.n_nodes = 1 + static_cast<int>(rng() % 120);
    spec.depth = 1 + static_cast<int>(rng() % static_cast<unsigned>(spec.n_nodes));
    spec.density = 0.01 + 0.99 * static_cast<double>(rng() % 1000) / 1000.0;
    spec.seed = rng();
    const SchedGraph g = gen_random_workload(spec);
    CHECK(shape_stats(g).depth == static_cast<std::size_t>(spec.depth));
    const std::size_t first_layer =
        static_cast<std::size_t>(spec.n_nodes / spec.depth + (spec.n_nodes % spec.depth > 0 ? 1 : 0));
    for (std::size_t v = first_layer; v < g.num_nodes(); ++v) CHECK_FALSE(g.is_source(v));
  }
}

TEST_CASE("property: edge count is nondecreasing in density") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::size_t prev = 0;
    for (double d : {0.01, 0.05, 0.1, 0.3, 0.6, 1.0}) {
      GenSpec spec;
      spec.n_nodes = 120;
      spec.depth = 8;
      spec.density = d;
      spec.seed = seed;
      const std::size_t e = gen_random_workload(spec).num_edges();
      CHECK(e >= prev);
      prev = e;
    }
  }
}
