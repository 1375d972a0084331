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

// Command-line front end. Talks to the library only through diffsched.h.
//
// Exit codes: 0 success, 1 internal error, 2 bad input (usage, parse,
// validation, I/O, oversized oracle instance), 3 latency below the minimum.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diffsched/diffsched.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

struct Failure {
  ds_status status;
  std::string message;
};

void check(ds_status st) {
  if (st != DS_OK) throw Failure{st, ds_last_error()};
}

int exit_code_for(ds_status st) {
  switch (st) {
    case DS_OK: return kExitOk;
    case DS_ERR_INFEASIBLE: return kExitInfeasible;
    case DS_ERR_INTERNAL: return kExitInternal;
    default: return kExitInput;
  }
}

struct GraphDeleter {
  void operator()(ds_graph* g) const { ds_graph_free(g); }
};
struct ResultDeleter {
  void operator()(ds_result* r) const { ds_result_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { ds_string_free(s); }
};
using GraphPtr = std::unique_ptr<ds_graph, GraphDeleter>;
using ResultPtr = std::unique_ptr<ds_result, ResultDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

CString take(char* s) { return CString(s); }

GraphPtr load(const std::string& path) {
  ds_graph* g = nullptr;
  check(ds_graph_load_file(path.c_str(), &g));
  return GraphPtr(g);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{DS_ERR_IO, "cannot open \"" + path + "\""};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{DS_ERR_IO, "cannot write \"" + path.string() + "\""};
}

// Prints `text` to stdout, or writes it to `path` when one is given.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else write_file(path, text);
}

// Shared optimization flags.
struct RunFlags {
  std::string graph;
  int latency = 10;
  double lambda = 10.0;
  double ratio = 10.0;
  int epochs = 500;
  double lr = 0.05;
  double tau_start = 1.0;
  double tau_end = 0.1;
  std::string optimizer = "adam";
  double weight_decay = 0.01;
  std::optional<std::uint64_t> seed;
  int seeds = 1;
  std::optional<std::int64_t> timeout_ms;
  std::optional<std::int64_t> sample_interval_ms;
  std::string out = ".";
  std::string format = "json";

  void add_graph_flags(CLI::App* app) {
    app->add_option("-g,--graph", graph, "Graph file (JSON or edge list)")->required();
    app->add_option("-L", latency, "Latency bound (number of stages)");
    app->add_option("--ratio", ratio, "Peak-memory weight in the discrete objective");
  }

  void add_optimizer_flags(CLI::App* app) {
    app->add_option("--lambda", lambda, "Weight of the memory-balance loss");
    app->add_option("--epochs", epochs, "Optimization epochs per restart");
    app->add_option("--lr", lr, "Learning rate");
    app->add_option("--tau-start", tau_start, "Initial softmax temperature");
    app->add_option("--tau-end", tau_end, "Final softmax temperature");
    app->add_option("--optimizer", optimizer, "adam or adamw")->check(CLI::IsMember({"adam", "adamw"}));
    app->add_option("--weight-decay", weight_decay, "Decoupled weight decay (adamw)");
    app->add_option("--seed", seed, "RNG seed (falls back to $DIFFSCHED_SEED, then 0)");
    app->add_option("--seeds", seeds, "Number of parallel restarts")->check(CLI::PositiveNumber);
    app->add_option("--timeout-ms", timeout_ms, "Wall-clock budget in milliseconds");
    app->add_option("--sample-interval-ms", sample_interval_ms, "Spacing of sampling points");
  }

  void add_output_flags(CLI::App* app) {
    app->add_option("--out", out, "Output directory");
    app->add_option("--format", format, "Printed format")->check(CLI::IsMember({"json", "csv"}));
  }

  std::uint64_t effective_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("DIFFSCHED_SEED")) {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used == std::string(env).size()) return v;
      } catch (const std::exception&) {
      }
      throw Failure{DS_ERR_INVALID_ARGUMENT, std::string("DIFFSCHED_SEED is not an unsigned integer: ") + env};
    }
    return 0;
  }

  ds_run_config run_config() const {
    ds_run_config c;
    ds_run_config_defaults(&c);
    c.latency = latency;
    c.epochs = epochs;
    c.lr = lr;
    c.lambda = lambda;
    c.ratio = ratio;
    c.tau_start = tau_start;
    c.tau_end = tau_end;
    c.optimizer = optimizer == "adamw" ? DS_OPT_ADAMW : DS_OPT_ADAM;
    c.weight_decay = weight_decay;
    c.seed = effective_seed();
    c.timeout_ms = timeout_ms ? *timeout_ms : -1;
    return c;
  }
};

std::string stages_csv(const std::string& schedule_json) {
  const auto j = nlohmann::ordered_json::parse(schedule_json);
  std::string out = "node,stage\n";
  for (const auto& [id, st] : j.at("stages").items()) out += id + "," + std::to_string(st.get<int>()) + "\n";
  return out;
}

// ---- subcommands ----------------------------------------------------------

int cmd_schedule(const RunFlags& f) {
  GraphPtr g = load(f.graph);
  const ds_run_config base = f.run_config();

  std::vector<ResultPtr> results(static_cast<std::size_t>(f.seeds));
  std::vector<ds_status> status(results.size(), DS_OK);
  std::vector<std::string> errors(results.size());
  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < results.size(); ++k) {
    workers.emplace_back([&, k] {
      ds_run_config c = base;
      c.seed = base.seed + k;
      ds_result* r = nullptr;
      status[k] = ds_run(g.get(), &c, &r);
      if (status[k] == DS_OK) results[k].reset(r);
      else errors[k] = ds_last_error();
    });
  }
  for (auto& w : workers) w.join();
  for (std::size_t k = 0; k < results.size(); ++k)
    if (status[k] != DS_OK) throw Failure{status[k], errors[k]};

  std::size_t best = 0;
  double best_obj = 0.0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    double obj = 0.0;
    check(ds_result_best_objective(results[k].get(), &obj));
    if (k == 0 || obj < best_obj) {
      best = k;
      best_obj = obj;
    }
  }
  char* sched = nullptr;
  check(ds_result_schedule_json(results[best].get(), &sched));
  CString sched_owner = take(sched);
  char* traj = nullptr;
  check(ds_result_trajectory_csv(results[best].get(), &traj));
  CString traj_owner = take(traj);

  const std::filesystem::path dir(f.out);
  write_file(dir / "schedule.json", sched);
  write_file(dir / "trajectory.csv", traj);
  std::cout << "best objective: " << best_obj << " (seed " << base.seed + best << ")\n";
  return kExitOk;
}

int cmd_baseline(const RunFlags& f, ds_method method, bool out_given) {
  GraphPtr g = load(f.graph);
  char* sched = nullptr;
  double obj = 0.0;
  check(ds_baseline(g.get(), f.latency, f.ratio, method, &sched, &obj));
  CString owner = take(sched);
  if (out_given) write_file(std::filesystem::path(f.out) / "schedule.json", sched);
  std::cout << "objective: " << obj << "\n";
  std::cout << (f.format == "csv" ? stages_csv(sched) : std::string(sched));
  return kExitOk;
}

int cmd_eval(const std::string& graph, const std::string& schedule_path, double ratio, const std::string& format) {
  GraphPtr g = load(graph);
  const std::string text = read_file(schedule_path);
  char* metrics = nullptr;
  check(ds_eval(g.get(), text.c_str(), ratio, &metrics));
  CString owner = take(metrics);
  if (format == "csv") {
    const auto j = nlohmann::ordered_json::parse(metrics);
    std::cout << "L,ratio,peak_mem,comm_total,lp_objective\n"
              << j["L"] << "," << j["ratio"] << "," << j["peak_mem"] << "," << j["comm_total"] << ","
              << j["lp_objective"] << "\n";
  } else {
    std::cout << metrics;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-based stage scheduling for weighted DAGs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ds_version()));

  RunFlags sched_flags;
  auto* schedule = app.add_subcommand("schedule", "Optimize a schedule by gradient descent");
  sched_flags.add_graph_flags(schedule);
  sched_flags.add_optimizer_flags(schedule);
  sched_flags.add_output_flags(schedule);

  RunFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "Exact optimum by exhaustive search (small graphs)");
  oracle_flags.add_graph_flags(oracle);
  oracle_flags.add_output_flags(oracle);

  RunFlags base_flags;
  std::string method = "greedy";
  auto* baseline = app.add_subcommand("baseline", "Heuristic schedule");
  base_flags.add_graph_flags(baseline);
  base_flags.add_output_flags(baseline);
  baseline->add_option("-m,--method", method, "asap, alap or greedy")->check(CLI::IsMember({"asap", "alap", "greedy"}));

  std::string eval_graph, eval_schedule, eval_format = "json";
  double eval_ratio = -1.0;
  auto* eval = app.add_subcommand("eval", "Evaluate a schedule file");
  eval->add_option("-g,--graph", eval_graph, "Graph file")->required();
  eval->add_option("-s,--schedule", eval_schedule, "Schedule JSON")->required();
  eval->add_option("--ratio", eval_ratio, "Override the ratio stored in the schedule");
  eval->add_option("--format", eval_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  ds_gen_spec spec;
  ds_gen_spec_defaults(&spec);
  std::string gen_output, gen_preset;
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("gen", "Generate a layered random workload");
  gen->add_option("--nodes", spec.n_nodes, "Number of nodes");
  gen->add_option("--depth", spec.depth, "Number of layers");
  gen->add_option("--density", spec.density, "Edge probability between adjacent layers");
  gen->add_option("--mem-min", spec.mem_min, "Smallest node memory weight");
  gen->add_option("--mem-max", spec.mem_max, "Largest node memory weight");
  gen->add_option("--comm-min", spec.comm_min, "Smallest edge communication cost");
  gen->add_option("--comm-max", spec.comm_max, "Largest edge communication cost");
  gen->add_option("--seed", gen_seed, "RNG seed (falls back to $DIFFSCHED_SEED, then 0)");
  gen->add_option("--preset", gen_preset, "rw1: 949 nodes, depth 15")->check(CLI::IsMember({"rw1"}));
  gen->add_option("-o,--output", gen_output, "Output file (default stdout)");

  RunFlags ilp_flags;
  std::string ilp_output;
  auto* ilp = app.add_subcommand("export-ilp", "Write the scheduling ILP in LP format");
  ilp_flags.add_graph_flags(ilp);
  ilp->add_option("-o,--output", ilp_output, "Output file (default stdout)");

  RunFlags cmp_flags;
  std::vector<std::string> cmp_methods{"diff", "asap", "alap", "greedy", "oracle"};
  std::string cmp_preset;
  auto* cmp = app.add_subcommand("compare", "Timed comparison of all methods");
  cmp_flags.add_graph_flags(cmp);
  cmp_flags.add_optimizer_flags(cmp);
  cmp_flags.add_output_flags(cmp);
  cmp->add_option("--methods", cmp_methods, "Methods to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"diff", "asap", "alap", "greedy", "oracle"}));
  cmp->add_option("--preset", cmp_preset, "paper: 11 points 360 s apart")->check(CLI::IsMember({"paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*schedule) return cmd_schedule(sched_flags);
    if (*oracle) return cmd_baseline(oracle_flags, DS_METHOD_ORACLE, oracle->count("--out") > 0);
    if (*baseline) {
      const ds_method m = method == "asap" ? DS_METHOD_ASAP : method == "alap" ? DS_METHOD_ALAP : DS_METHOD_GREEDY;
      return cmd_baseline(base_flags, m, baseline->count("--out") > 0);
    }
    if (*eval) return cmd_eval(eval_graph, eval_schedule, eval_ratio, eval_format);
    if (*gen) {
      if (gen_preset == "rw1") {
        if (gen->count("--nodes") == 0) spec.n_nodes = 949;
        if (gen->count("--depth") == 0) spec.depth = 15;
        if (gen->count("--density") == 0) spec.density = 0.02;
      }
      RunFlags seed_source;
      seed_source.seed = gen_seed;
      spec.seed = seed_source.effective_seed();
      ds_graph* raw = nullptr;
      check(ds_generate(&spec, &raw));
      GraphPtr g(raw);
      char* text = nullptr;
      check(ds_graph_to_json(g.get(), &text));
      CString owner = take(text);
      emit(gen_output, text);
      return kExitOk;
    }
    if (*ilp) {
      GraphPtr g = load(ilp_flags.graph);
      char* text = nullptr;
      check(ds_export_ilp(g.get(), ilp_flags.latency, ilp_flags.ratio, &text));
      CString owner = take(text);
      emit(ilp_output, text);
      return kExitOk;
    }
    if (*cmp) {
      GraphPtr g = load(cmp_flags.graph);
      ds_compare_config cfg;
      if (cmp_preset == "paper") ds_compare_config_paper(&cfg);
      else ds_compare_config_defaults(&cfg);
      const int preset_epochs = cfg.run.epochs;
      cfg.run = cmp_flags.run_config();
      if (cmp->count("--epochs") == 0) cfg.run.epochs = preset_epochs;
      cfg.seeds = cmp_flags.seeds;
      if (cmp_flags.timeout_ms) cfg.timeout_ms = *cmp_flags.timeout_ms;
      if (cmp_flags.sample_interval_ms) cfg.sample_interval_ms = *cmp_flags.sample_interval_ms;
      cfg.methods = 0;
      for (const auto& m : cmp_methods) {
        if (m == "diff") cfg.methods |= DS_METHOD_DIFF;
        if (m == "asap") cfg.methods |= DS_METHOD_ASAP;
        if (m == "alap") cfg.methods |= DS_METHOD_ALAP;
        if (m == "greedy") cfg.methods |= DS_METHOD_GREEDY;
        if (m == "oracle") cfg.methods |= DS_METHOD_ORACLE;
      }
      char* json = nullptr;
      char* csv = nullptr;
      check(ds_compare(g.get(), &cfg, &json, &csv));
      CString json_owner = take(json), csv_owner = take(csv);
      const std::filesystem::path dir(cmp_flags.out);
      write_file(dir / "report.json", json);
      write_file(dir / "report.csv", csv);
      if (cmp_flags.format == "csv") {
        std::cout << csv;
      } else {
        const auto j = nlohmann::ordered_json::parse(json);
        for (const auto& m : j["methods"]) {
          std::cout << m["method"].get<std::string>() << ": ";
          if (m["skipped"].get<bool>()) std::cout << "skipped (" << m["note"].get<std::string>() << ")\n";
          else std::cout << m["final_objective"] << "\n";
        }
      }
      return kExitOk;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInput;
}
