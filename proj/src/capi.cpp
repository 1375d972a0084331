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

#include "diffsched/diffsched.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <json.hpp>

#include "diffsched/baselines.hpp"
#include "diffsched/engine.hpp"
#include "diffsched/error.hpp"
#include "diffsched/generator.hpp"
#include "diffsched/graph.hpp"
#include "diffsched/harness.hpp"
#include "diffsched/ilp.hpp"
#include "diffsched/losses.hpp"

struct ds_graph {
  diffsched::SchedGraph graph;
};

struct ds_result {
  diffsched::SchedGraph graph;  // copy, so the result outlives its graph handle
  diffsched::RunResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_min_latency = 0;

ds_status fail(ds_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
ds_status guarded(F&& body) {
  g_last_error.clear();
  g_last_min_latency = 0;
  try {
    body();
    return DS_OK;
  } catch (const diffsched::InfeasibleError& e) {
    g_last_min_latency = e.min_latency();
    return fail(DS_ERR_INFEASIBLE, e.what());
  } catch (const diffsched::ValidationError& e) {
    return fail(DS_ERR_VALIDATION, e.what());
  } catch (const diffsched::ParseError& e) {
    return fail(DS_ERR_PARSE, e.what());
  } catch (const diffsched::IoError& e) {
    return fail(DS_ERR_IO, e.what());
  } catch (const std::length_error& e) {
    return fail(DS_ERR_TOO_LARGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(DS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DS_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

diffsched::RunConfig to_config(const ds_run_config& c) {
  diffsched::RunConfig r;
  r.latency = c.latency;
  r.epochs = c.epochs;
  r.lr = c.lr;
  r.lambda = c.lambda;
  r.ratio = c.ratio;
  r.tau_start = c.tau_start;
  r.tau_end = c.tau_end;
  require(c.optimizer == DS_OPT_ADAM || c.optimizer == DS_OPT_ADAMW, "unknown optimizer");
  r.optimizer = c.optimizer == DS_OPT_ADAMW ? diffsched::OptimizerKind::AdamW : diffsched::OptimizerKind::Adam;
  r.weight_decay = c.weight_decay;
  r.seed = c.seed;
  r.init_bias = c.init_bias;
  if (c.timeout_ms >= 0) r.timeout_ms = c.timeout_ms;
  return r;
}

void write_file(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw diffsched::IoError(std::string("cannot open \"") + path + "\" for writing");
  out << text;
  if (!out) throw diffsched::IoError(std::string("write to \"") + path + "\" failed");
}

}  // namespace

extern "C" {

const char* ds_version(void) { return "0.1.0"; }
const char* ds_last_error(void) { return g_last_error.c_str(); }
int ds_last_min_latency(void) { return g_last_min_latency; }
void ds_string_free(char* s) { std::free(s); }

ds_status ds_graph_load_file(const char* path, ds_graph** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new ds_graph{diffsched::load_graph_file(path)};
  });
}

ds_status ds_graph_load_string(const char* text, ds_graph** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new ds_graph{diffsched::load_graph(text)};
  });
}

void ds_graph_free(ds_graph* g) { delete g; }

ds_status ds_graph_to_json(const ds_graph* g, char** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = dup_string(diffsched::save_graph(g->graph));
  });
}

ds_status ds_graph_save_file(const ds_graph* g, const char* path) {
  return guarded([&] {
    require(g && path, "null argument");
    write_file(path, diffsched::save_graph(g->graph));
  });
}

ds_status ds_graph_min_latency(const ds_graph* g, int* out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = diffsched::min_feasible_latency(g->graph);
  });
}

ds_status ds_graph_stats(const ds_graph* g, ds_shape_stats* out) {
  return guarded([&] {
    require(g && out, "null argument");
    const auto s = diffsched::shape_stats(g->graph);
    *out = ds_shape_stats{s.n_nodes, s.n_edges, s.depth, s.avg_out_degree};
  });
}

void ds_run_config_defaults(ds_run_config* cfg) {
  if (!cfg) return;
  const diffsched::RunConfig d;
  *cfg = ds_run_config{d.latency,  d.epochs,  d.lr, d.lambda, d.ratio,  d.tau_start,
                       d.tau_end, DS_OPT_ADAM, d.weight_decay, d.seed, d.init_bias, -1};
}

ds_status ds_run(const ds_graph* g, const ds_run_config* cfg, ds_result** out) {
  return guarded([&] {
    require(g && cfg && out, "null argument");
    auto* r = new ds_result{g->graph, {}};
    try {
      r->result = diffsched::run(r->graph, to_config(*cfg));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void ds_result_free(ds_result* r) { delete r; }

ds_status ds_result_best_objective(const ds_result* r, double* out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = r->result.best_objective;
  });
}

ds_status ds_result_epochs(const ds_result* r, size_t* out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = r->result.trajectory.size();
  });
}

ds_status ds_result_schedule_json(const ds_result* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    const auto& c = r->result.config;
    *out = dup_string(diffsched::schedule_to_json(r->graph, r->result.best_schedule, c.latency, c.ratio));
  });
}

ds_status ds_result_trajectory_csv(const ds_result* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = dup_string(diffsched::trajectory_to_csv(r->result.trajectory));
  });
}

ds_status ds_baseline(const ds_graph* g, int latency, double ratio, ds_method method, char** schedule_json,
                      double* objective) {
  return guarded([&] {
    require(g && schedule_json, "null argument");
    require(latency >= 1, "latency must be >= 1");
    diffsched::Schedule s;
    switch (method) {
      case DS_METHOD_ASAP: s = diffsched::asap(g->graph, latency); break;
      case DS_METHOD_ALAP: s = diffsched::alap(g->graph, latency); break;
      case DS_METHOD_GREEDY: s = diffsched::greedy_balance(g->graph, latency, ratio); break;
      case DS_METHOD_ORACLE: s = diffsched::brute_force(g->graph, latency, ratio).schedule; break;
      default: throw std::invalid_argument("baseline method must be asap, alap, greedy or oracle");
    }
    const std::string text = diffsched::schedule_to_json(g->graph, s, latency, ratio);
    if (objective) *objective = diffsched::discrete_metrics(g->graph, s, latency, ratio).lp_objective;
    *schedule_json = dup_string(text);
  });
}

ds_status ds_eval(const ds_graph* g, const char* schedule_json, double ratio, char** metrics_json) {
  return guarded([&] {
    require(g && schedule_json && metrics_json, "null argument");
    const auto file = diffsched::schedule_from_json(g->graph, schedule_json);
    const double rho = ratio >= 0.0 ? ratio : file.ratio.value_or(10.0);
    const auto violations = diffsched::check_legal(g->graph, file.schedule, file.latency);
    if (!violations.empty()) {
      std::vector<std::string> lines;
      for (const auto& v : violations) lines.push_back(v.describe);
      throw diffsched::ValidationError(std::move(lines), "illegal schedule");
    }
    const auto m = diffsched::discrete_metrics(g->graph, file.schedule, file.latency, rho);
    nlohmann::ordered_json j;
    j["L"] = file.latency;
    j["ratio"] = rho;
    j["peak_mem"] = m.peak_mem;
    j["comm_total"] = m.comm_total;
    j["lp_objective"] = m.lp_objective;
    j["stage_mem"] = m.stage_mem;
    j["boundary_comm"] = m.boundary_comm;
    if (g->graph.total_mem() > 0.0)
      j["entropy"] = diffsched::schedule_entropy(g->graph, file.schedule, file.latency);
    *metrics_json = dup_string(j.dump() + "\n");
  });
}

ds_status ds_export_ilp(const ds_graph* g, int latency, double ratio, char** lp_text) {
  return guarded([&] {
    require(g && lp_text, "null argument");
    *lp_text = dup_string(diffsched::to_lp_text(diffsched::export_ilp(g->graph, latency, ratio)));
  });
}

void ds_gen_spec_defaults(ds_gen_spec* spec) {
  if (!spec) return;
  const diffsched::GenSpec d;
  *spec = ds_gen_spec{d.n_nodes,         d.depth,           d.density, d.mem_range.first, d.mem_range.second,
                      d.comm_range.first, d.comm_range.second, d.seed};
}

ds_status ds_generate(const ds_gen_spec* spec, ds_graph** out) {
  return guarded([&] {
    require(spec && out, "null argument");
    diffsched::GenSpec s;
    s.n_nodes = spec->n_nodes;
    s.depth = spec->depth;
    s.density = spec->density;
    s.mem_range = {spec->mem_min, spec->mem_max};
    s.comm_range = {spec->comm_min, spec->comm_max};
    s.seed = spec->seed;
    *out = new ds_graph{diffsched::gen_random_workload(s)};
  });
}

namespace {

void fill_compare(ds_compare_config* cfg, const diffsched::CompareConfig& c) {
  ds_run_config_defaults(&cfg->run);
  cfg->run.epochs = c.run.epochs;
  cfg->seeds = c.seeds;
  cfg->methods = DS_METHOD_DIFF | DS_METHOD_ASAP | DS_METHOD_ALAP | DS_METHOD_GREEDY | DS_METHOD_ORACLE;
  cfg->timeout_ms = c.timeout_ms;
  cfg->sample_interval_ms = c.sample_interval_ms;
}

}  // namespace

void ds_compare_config_defaults(ds_compare_config* cfg) {
  if (cfg) fill_compare(cfg, diffsched::CompareConfig{});
}

void ds_compare_config_paper(ds_compare_config* cfg) {
  if (cfg) fill_compare(cfg, diffsched::paper_compare_preset());
}

ds_status ds_compare(const ds_graph* g, const ds_compare_config* cfg, char** report_json, char** report_csv) {
  return guarded([&] {
    require(g && cfg, "null argument");
    diffsched::CompareConfig c;
    c.run = to_config(cfg->run);
    c.run.timeout_ms.reset();
    c.seeds = cfg->seeds;
    c.timeout_ms = cfg->timeout_ms;
    c.sample_interval_ms = cfg->sample_interval_ms;
    c.methods.clear();
    const std::pair<unsigned, diffsched::Method> table[] = {
        {DS_METHOD_DIFF, diffsched::Method::Diff},     {DS_METHOD_ASAP, diffsched::Method::Asap},
        {DS_METHOD_ALAP, diffsched::Method::Alap},     {DS_METHOD_GREEDY, diffsched::Method::Greedy},
        {DS_METHOD_ORACLE, diffsched::Method::Oracle}};
    for (const auto& [bit, m] : table)
      if (cfg->methods & bit) c.methods.push_back(m);
    require(!c.methods.empty(), "no methods selected");
    const auto report = diffsched::compare(g->graph, c);
    std::string json = diffsched::report_to_json(g->graph, report);
    std::string csv = diffsched::report_to_csv(report);
    if (report_json) *report_json = dup_string(json);
    if (report_csv) {
      try {
        *report_csv = dup_string(csv);
      } catch (...) {
        if (report_json) std::free(*report_json);
        throw;
      }
    }
  });
}

}  // extern "C"
