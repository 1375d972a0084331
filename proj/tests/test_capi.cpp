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

// Exercises the shared library strictly through its C header.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "diffsched/diffsched.h"

namespace {

const char* kChain = R"({"nodes":[{"id":"a"},{"id":"b"}],"edges":[{"src":"a","dst":"b"}]})";

std::string take(char* s) {
  std::string out = s ? s : "";
  ds_string_free(s);
  return out;
}

ds_graph* must_load(const char* text) {
  ds_graph* g = nullptr;
  REQUIRE(ds_graph_load_string(text, &g) == DS_OK);
  return g;
}

}  // namespace

TEST_CASE("version and null handling") {
  CHECK(std::strlen(ds_version()) > 0);
  ds_graph_free(nullptr);
  ds_result_free(nullptr);
  ds_string_free(nullptr);
  CHECK(ds_graph_load_string(nullptr, nullptr) == DS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ds_last_error()).find("null") != std::string::npos);
}

TEST_CASE("graph loading status codes") {
  ds_graph* g = nullptr;
  CHECK(ds_graph_load_string("{\"nodes\":[", &g) == DS_ERR_PARSE);
  CHECK(g == nullptr);
  CHECK(ds_graph_load_string(R"({"nodes":[{"id":"a"},{"id":"a"}],"edges":[]})", &g) == DS_ERR_VALIDATION);
  CHECK(std::string(ds_last_error()).find("duplicate id") != std::string::npos);
  CHECK(ds_graph_load_file("/no/such/file.json", &g) == DS_ERR_IO);

  g = must_load("a b 1 -1\nb c 2 -1\n");
  int lmin = 0;
  CHECK(ds_graph_min_latency(g, &lmin) == DS_OK);
  CHECK(lmin == 3);
  ds_shape_stats st;
  CHECK(ds_graph_stats(g, &st) == DS_OK);
  CHECK(st.n_nodes == 3);
  CHECK(st.n_edges == 2);
  CHECK(st.depth == 3);
  char* json = nullptr;
  CHECK(ds_graph_to_json(g, &json) == DS_OK);
  const std::string text = take(json);
  ds_graph* again = must_load(text.c_str());
  char* json2 = nullptr;
  CHECK(ds_graph_to_json(again, &json2) == DS_OK);
  CHECK(take(json2) == text);
  ds_graph_free(again);
  ds_graph_free(g);
}

TEST_CASE("run, result accessors, infeasible latency") {
  ds_graph* g = must_load(kChain);
  ds_run_config cfg;
  ds_run_config_defaults(&cfg);
  CHECK(cfg.epochs == 500);
  CHECK(cfg.lr == 0.05);
  CHECK(cfg.timeout_ms < 0);
  cfg.latency = 2;
  cfg.epochs = 200;
  ds_result* r = nullptr;
  REQUIRE(ds_run(g, &cfg, &r) == DS_OK);
  double best = 0.0;
  CHECK(ds_result_best_objective(r, &best) == DS_OK);
  CHECK(best == 11.0);
  size_t epochs = 0;
  CHECK(ds_result_epochs(r, &epochs) == DS_OK);
  CHECK(epochs == 200);
  char* sched = nullptr;
  CHECK(ds_result_schedule_json(r, &sched) == DS_OK);
  CHECK(take(sched).find("\"lp_objective\":11.0") != std::string::npos);
  char* csv = nullptr;
  CHECK(ds_result_trajectory_csv(r, &csv) == DS_OK);
  CHECK(take(csv).rfind("epoch,wall_ms,", 0) == 0);
  // The result owns a copy of the graph.
  ds_graph_free(g);
  char* again = nullptr;
  CHECK(ds_result_schedule_json(r, &again) == DS_OK);
  ds_string_free(again);
  ds_result_free(r);

  ds_graph* tight = must_load("a b 1 -1\nb c 1 -1\n");
  cfg.latency = 2;
  ds_result* none = nullptr;
  CHECK(ds_run(tight, &cfg, &none) == DS_ERR_INFEASIBLE);
  CHECK(none == nullptr);
  CHECK(ds_last_min_latency() == 3);
  CHECK(std::string(ds_last_error()).find("3") != std::string::npos);
  cfg.latency = 3;
  cfg.epochs = 0;
  CHECK(ds_run(tight, &cfg, &none) == DS_ERR_INVALID_ARGUMENT);
  ds_graph_free(tight);
}

TEST_CASE("baselines, eval, ILP export") {
  ds_graph* g = must_load(kChain);
  char* sched = nullptr;
  double obj = 0.0;
  REQUIRE(ds_baseline(g, 2, 10.0, DS_METHOD_ORACLE, &sched, &obj) == DS_OK);
  CHECK(obj == 11.0);
  const std::string oracle_json = take(sched);
  for (ds_method m : {DS_METHOD_ASAP, DS_METHOD_ALAP, DS_METHOD_GREEDY}) {
    REQUIRE(ds_baseline(g, 2, 10.0, m, &sched, &obj) == DS_OK);
    ds_string_free(sched);
  }
  CHECK(ds_baseline(g, 2, 10.0, DS_METHOD_DIFF, &sched, &obj) == DS_ERR_INVALID_ARGUMENT);

  char* metrics = nullptr;
  REQUIRE(ds_eval(g, oracle_json.c_str(), -1.0, &metrics) == DS_OK);
  const std::string m = take(metrics);
  CHECK(m.find("\"lp_objective\":11.0") != std::string::npos);
  REQUIRE(ds_eval(g, oracle_json.c_str(), 1.0, &metrics) == DS_OK);
  CHECK(take(metrics).find("\"lp_objective\":2.0") != std::string::npos);
  CHECK(ds_eval(g, R"({"L":2,"stages":{"a":1,"b":0}})", -1.0, &metrics) == DS_ERR_VALIDATION);
  CHECK(std::string(ds_last_error()).find("a -> b") != std::string::npos);
  CHECK(ds_eval(g, "{", -1.0, &metrics) == DS_ERR_PARSE);

  char* lp = nullptr;
  REQUIRE(ds_export_ilp(g, 2, 10.0, &lp) == DS_OK);
  const std::string lp_text = take(lp);
  CHECK(lp_text.find("Subject To") != std::string::npos);
  CHECK(lp_text.find("End\n") != std::string::npos);
  ds_graph_free(g);

  ds_graph* big = must_load(std::string(
      [] {
        std::string s;
        for (int i = 0; i < 30; ++i) s += "n" + std::to_string(i) + " n" + std::to_string(i + 1) + "\n";
        return s;
      }())
                                .c_str());
  CHECK(ds_baseline(big, 3, 10.0, DS_METHOD_ORACLE, &sched, &obj) == DS_ERR_TOO_LARGE);
  ds_graph_free(big);
}

TEST_CASE("generate and compare") {
  ds_gen_spec spec;
  ds_gen_spec_defaults(&spec);
  spec.n_nodes = 40;
  spec.depth = 5;
  ds_graph* g = nullptr;
  REQUIRE(ds_generate(&spec, &g) == DS_OK);
  ds_shape_stats st;
  ds_graph_stats(g, &st);
  CHECK(st.depth == 5);
  spec.depth = 0;
  ds_graph* bad = nullptr;
  CHECK(ds_generate(&spec, &bad) == DS_ERR_INVALID_ARGUMENT);

  ds_compare_config cfg;
  ds_compare_config_defaults(&cfg);
  CHECK(cfg.sample_interval_ms == 1000);
  CHECK(cfg.timeout_ms == 60000);
  cfg.run.latency = 5;
  cfg.methods = DS_METHOD_DIFF | DS_METHOD_GREEDY | DS_METHOD_ORACLE;
  cfg.timeout_ms = 200;
  cfg.sample_interval_ms = 100;
  char* json = nullptr;
  char* csv = nullptr;
  REQUIRE(ds_compare(g, &cfg, &json, &csv) == DS_OK);
  const std::string j = take(json);
  CHECK(j.find("\"method\": \"greedy\"") != std::string::npos);
  CHECK(j.find("\"skipped\": true") != std::string::npos);
  CHECK(take(csv).rfind("method,sample_index,time_ms,best_objective,normalized\n", 0) == 0);

  ds_compare_config paper;
  ds_compare_config_paper(&paper);
  CHECK(paper.sample_interval_ms == 360000);
  CHECK(paper.timeout_ms == 3600000);
  ds_graph_free(g);
}

TEST_CASE("errors are per thread") {
  ds_graph* g = nullptr;
  CHECK(ds_graph_load_string("{", &g) == DS_ERR_PARSE);
  const std::string here = ds_last_error();
  std::string there;
  std::thread t([&] {
    ds_graph* h = nullptr;
    ds_graph_load_string(R"({"nodes":[{"id":"a"},{"id":"a"}],"edges":[]})", &h);
    there = ds_last_error();
  });
  t.join();
  CHECK(std::string(ds_last_error()) == here);
  CHECK(there != here);
}
