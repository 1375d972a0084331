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

#include <cmath>

#include "diffsched/engine.hpp"
#include "diffsched/error.hpp"
#include "diffsched/generator.hpp"
#include "support/oracles.hpp"

using namespace diffsched;
using doctest::Approx;

namespace {

SchedGraph chain_ab() { return load_graph(R"({"nodes":[{"id":"a"},{"id":"b"}],"edges":[{"src":"a","dst":"b"}]})"); }

RunConfig small_config(int L, int epochs, std::uint64_t seed) {
  RunConfig c;
  c.latency = L;
  c.epochs = epochs;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("validate_config") {
  CHECK_NOTHROW(validate_config(RunConfig{}));
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  };
  bad([](RunConfig& c) { c.latency = 0; });
  bad([](RunConfig& c) { c.epochs = 0; });
  bad([](RunConfig& c) { c.lr = 0.0; });
  bad([](RunConfig& c) { c.tau_end = 0.0; });
  bad([](RunConfig& c) { c.tau_start = 0.05; });
  bad([](RunConfig& c) { c.lambda = -1.0; });
  bad([](RunConfig& c) { c.timeout_ms = -5; });
}

TEST_CASE("init_params") {
  const SchedGraph g = load_graph(R"({"nodes":[{"id":"s"},{"id":"t"},{"id":"u"}],"edges":[{"src":"s","dst":"t"}]})");
  RunConfig c;
  c.latency = 3;
  c.init_bias = 3.0;
  Rng r1(9), r2(9);
  const ParamMatrix w = init_params(g, c, r1);
  CHECK(w.rows() == 3);
  CHECK(w.cols() == 3);
  // Sources: s and u.
  CHECK(w.row(0)[0] == 3.0);
  CHECK(w.row(0)[1] == 0.0);
  CHECK(w.row(2)[0] == 3.0);
  for (double x : w.row(1)) {
    CHECK(x >= -0.5);
    CHECK(x <= 0.5);
  }
  const double p0 = std::exp(3.0) / (std::exp(3.0) + 2.0);
  CHECK(p0 == Approx(0.9094).epsilon(1e-3));
  Tape t;
  CHECK(t.value(t.softmax(t.constant(w.row(0)), 1.0))[0] == Approx(p0));
  CHECK(init_params(g, c, r2) == w);
}

TEST_CASE("adam_step") {
  AdamOptions opt;
  opt.lr = 0.1;
  std::vector<double> w{1.0, -2.0};
  AdamState st(2);
  adam_step(w, std::vector<double>{0.0, 0.0}, st, opt);
  CHECK(w == std::vector<double>{1.0, -2.0});

  std::vector<double> w1{0.0};
  AdamState s1(1);
  adam_step(w1, std::vector<double>{1.0}, s1, opt);
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  CHECK(w1[0] == Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-15));

  AdamOptions wd = opt;
  wd.weight_decay = 0.01;
  std::vector<double> w2{2.0};
  AdamState s2(1);
  adam_step(w2, std::vector<double>{0.0}, s2, wd);
  CHECK(w2[0] == Approx(2.0 * (1.0 - 0.1 * 0.01)));

  AdamState wrong(3);
  CHECK_THROWS_AS(adam_step(w, std::vector<double>{0.0, 0.0}, wrong, opt), std::invalid_argument);
}

TEST_CASE("tau_schedule") {
  CHECK(tau_schedule(0, 50, 1.0, 0.1) == 1.0);
  CHECK(tau_schedule(49, 50, 1.0, 0.1) == Approx(0.1));
  CHECK(tau_schedule(50, 101, 1.0, 0.1) == Approx(std::sqrt(0.1)));
  CHECK(tau_schedule(0, 1, 0.7, 0.1) == 0.7);
}

TEST_CASE("run: single node") {
  const SchedGraph g = load_graph(R"({"nodes":[{"id":"a"}],"edges":[]})");
  const RunResult r = run(g, small_config(4, 20, 1));
  CHECK(check_legal(g, r.best_schedule, 4).empty());
  CHECK(r.best_objective == 10.0);
  for (const auto& p : r.trajectory) CHECK(p.loss_comm == 0.0);
}

TEST_CASE("run: chain optimum over a seed sweep") {
  const SchedGraph g = chain_ab();
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunConfig c = small_config(2, 500, seed);
    c.lambda = c.ratio = 10.0;
    if (run(g, c).best_objective == 11.0) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("run: every epoch of the five-edge example is legal") {
  const SchedGraph g = load_graph(R"({"nodes":[{"id":"v0"},{"id":"v1"},{"id":"v2"},{"id":"v3"},{"id":"v4"},{"id":"v5"}],
    "edges":[{"src":"v0","dst":"v4"},{"src":"v1","dst":"v4"},{"src":"v2","dst":"v3"},
             {"src":"v3","dst":"v5"},{"src":"v4","dst":"v5"}]})");
  std::size_t epochs = 0;
  const auto p = oracle::plain(g);
  run(g, small_config(3, 200, 3), [&](const EpochRecord& rec) {
    ++epochs;
    REQUIRE(oracle::legal(p, rec.schedule.stage, 3));
    CHECK(rec.loss.total == Approx(rec.loss.lambda * rec.loss.entropy + rec.loss.comm).epsilon(1e-12));
  });
  CHECK(epochs == 200);
}

TEST_CASE("run: infeasible latency and bad config") {
  const SchedGraph g = load_graph("a b 1 -1\nb c 1 -1\n");
  try {
    run(g, small_config(2, 5, 0));
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.min_latency() == 3);
  }
  CHECK_THROWS_AS(run(g, small_config(3, 0, 0)), std::invalid_argument);
}

TEST_CASE("property: trajectory bookkeeping and reproducibility") {
  std::mt19937_64 mt(21);
  for (int k = 0; k < 10; ++k) {
    oracle::DagOptions opt;
    opt.n = 12;
    opt.c_choices = {-1, 0, 0};
    const SchedGraph g = oracle::random_dag(mt, opt);
    const RunConfig c = small_config(min_feasible_latency(g) + 2, 60, static_cast<std::uint64_t>(k));
    const RunResult a = run(g, c);
    const RunResult b = run(g, c);
    double best = INFINITY;
    REQUIRE(a.trajectory.size() == 60);
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
      const auto& p = a.trajectory[i];
      best = std::min(best, p.lp_objective);
      CHECK(p.best_so_far == best);
      if (i > 0) CHECK(p.best_so_far <= a.trajectory[i - 1].best_so_far);
      const auto& q = b.trajectory[i];
      CHECK(p.loss_total == q.loss_total);
      CHECK(p.lp_objective == q.lp_objective);
    }
    CHECK(a.best_objective == best);
    CHECK(a.best_schedule == b.best_schedule);
    CHECK(check_legal(g, a.best_schedule, c.latency).empty());
    CHECK(discrete_metrics(g, a.best_schedule, c.latency, c.ratio).lp_objective == a.best_objective);
  }
}

TEST_CASE("run: timeout stops between epochs") {
  GenSpec spec;
  spec.n_nodes = 300;
  spec.depth = 10;
  spec.density = 0.05;
  const SchedGraph g = gen_random_workload(spec);
  RunConfig c = small_config(10, 1000000, 0);
  c.timeout_ms = 0;
  CHECK(run(g, c).trajectory.size() == 1);
  c.timeout_ms = 200;
  const auto r = run(g, c);
  CHECK(r.trajectory.size() >= 1);
  CHECK(r.trajectory.size() < 1000000);
}

TEST_CASE("run: AdamW path runs and differs from Adam") {
  const SchedGraph g = load_graph("a b 2\nb c 1\na c 3\nc d 1\n");
  RunConfig c = small_config(3, 100, 4);
  const RunResult adam = run(g, c);
  c.optimizer = OptimizerKind::AdamW;
  c.weight_decay = 0.5;
  const RunResult adamw = run(g, c);
  CHECK(adamw.trajectory.size() == 100);
  bool differs = false;
  for (std::size_t i = 0; i < 100; ++i) differs = differs || adam.trajectory[i].loss_total != adamw.trajectory[i].loss_total;
  CHECK(differs);
}

TEST_CASE("property: loss falls between early and later epochs on layered workloads") {
  GenSpec spec;
  spec.n_nodes = 240;
  spec.depth = 12;
  spec.density = 0.04;
  spec.seed = 5;
  const SchedGraph g = gen_random_workload(spec);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunResult r = run(g, small_config(10, 80, seed));
    std::vector<double> early, late;
    for (int e = 1; e <= 5; ++e) early.push_back(r.trajectory[static_cast<std::size_t>(e)].loss_total);
    for (int e = 70; e <= 75; ++e) late.push_back(r.trajectory[static_cast<std::size_t>(e)].loss_total);
    CHECK(oracle::median(late) < oracle::median(early));
  }
}
