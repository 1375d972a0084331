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

/*
 * diffsched C interface.
 *
 * Every fallible call returns a ds_status. On failure a description is
 * available from ds_last_error() on the same thread until the next call.
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with ds_string_free(). Handles are released with their
 * matching *_free function; passing NULL to any free function is a no-op.
 */

#ifndef DIFFSCHED_DIFFSCHED_H
#define DIFFSCHED_DIFFSCHED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DIFFSCHED_BUILDING_LIBRARY)
#    define DS_API __declspec(dllexport)
#  else
#    define DS_API __declspec(dllimport)
#  endif
#else
#  define DS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ds_status {
  DS_OK = 0,
  DS_ERR_PARSE = 1,
  DS_ERR_VALIDATION = 2,
  DS_ERR_INFEASIBLE = 3,
  DS_ERR_INVALID_ARGUMENT = 4,
  DS_ERR_TOO_LARGE = 5,
  DS_ERR_IO = 6,
  DS_ERR_INTERNAL = 7
} ds_status;

typedef struct ds_graph ds_graph;
typedef struct ds_result ds_result;

typedef enum ds_optimizer { DS_OPT_ADAM = 0, DS_OPT_ADAMW = 1 } ds_optimizer;

typedef enum ds_method {
  DS_METHOD_DIFF = 1 << 0,
  DS_METHOD_ASAP = 1 << 1,
  DS_METHOD_ALAP = 1 << 2,
  DS_METHOD_GREEDY = 1 << 3,
  DS_METHOD_ORACLE = 1 << 4
} ds_method;

typedef struct ds_run_config {
  int latency;
  int epochs;
  double lr;
  double lambda;
  double ratio;
  double tau_start;
  double tau_end;
  ds_optimizer optimizer;
  double weight_decay;
  uint64_t seed;
  double init_bias;
  int64_t timeout_ms; /* negative: no timeout */
} ds_run_config;

typedef struct ds_gen_spec {
  int n_nodes;
  int depth;
  double density;
  double mem_min, mem_max;
  double comm_min, comm_max;
  uint64_t seed;
} ds_gen_spec;

typedef struct ds_shape_stats {
  size_t n_nodes;
  size_t n_edges;
  size_t depth;
  double avg_out_degree;
} ds_shape_stats;

typedef struct ds_compare_config {
  ds_run_config run;
  int seeds;
  unsigned methods; /* bitwise OR of ds_method */
  int64_t timeout_ms;
  int64_t sample_interval_ms;
} ds_compare_config;

DS_API const char* ds_version(void);
DS_API const char* ds_last_error(void);
/* Minimum feasible latency carried by the last DS_ERR_INFEASIBLE, else 0. */
DS_API int ds_last_min_latency(void);
DS_API void ds_string_free(char* s);

/* ---- graphs ---- */
DS_API ds_status ds_graph_load_file(const char* path, ds_graph** out);
/* JSON when the first non-blank character is '{', edge list otherwise. */
DS_API ds_status ds_graph_load_string(const char* text, ds_graph** out);
DS_API void ds_graph_free(ds_graph* g);
DS_API ds_status ds_graph_to_json(const ds_graph* g, char** out);
DS_API ds_status ds_graph_save_file(const ds_graph* g, const char* path);
DS_API ds_status ds_graph_min_latency(const ds_graph* g, int* out);
DS_API ds_status ds_graph_stats(const ds_graph* g, ds_shape_stats* out);

/* ---- differentiable scheduling ---- */
DS_API void ds_run_config_defaults(ds_run_config* cfg);
DS_API ds_status ds_run(const ds_graph* g, const ds_run_config* cfg, ds_result** out);
DS_API void ds_result_free(ds_result* r);
DS_API ds_status ds_result_best_objective(const ds_result* r, double* out);
DS_API ds_status ds_result_epochs(const ds_result* r, size_t* out);
DS_API ds_status ds_result_schedule_json(const ds_result* r, char** out);
DS_API ds_status ds_result_trajectory_csv(const ds_result* r, char** out);

/* ---- baselines and evaluation ---- */
/* method must be one of ASAP, ALAP, GREEDY or ORACLE. */
DS_API ds_status ds_baseline(const ds_graph* g, int latency, double ratio, ds_method method, char** schedule_json,
                             double* objective);
/* Evaluates a schedule JSON document. A negative ratio takes metrics.ratio
 * from the document (10 when absent). Illegal schedules yield
 * DS_ERR_VALIDATION with every violated edge listed in ds_last_error(). */
DS_API ds_status ds_eval(const ds_graph* g, const char* schedule_json, double ratio, char** metrics_json);
DS_API ds_status ds_export_ilp(const ds_graph* g, int latency, double ratio, char** lp_text);

/* ---- generation ---- */
DS_API void ds_gen_spec_defaults(ds_gen_spec* spec);
DS_API ds_status ds_generate(const ds_gen_spec* spec, ds_graph** out);

/* ---- experiments ---- */
DS_API void ds_compare_config_defaults(ds_compare_config* cfg);
/* 11 sampling points 360 s apart. */
DS_API void ds_compare_config_paper(ds_compare_config* cfg);
DS_API ds_status ds_compare(const ds_graph* g, const ds_compare_config* cfg, char** report_json, char** report_csv);

#ifdef __cplusplus
}
#endif

#endif /* DIFFSCHED_DIFFSCHED_H */
