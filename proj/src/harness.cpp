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

#include "diffsched/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "diffsched/baselines.hpp"
#include "diffsched/error.hpp"
#include "diffsched/generator.hpp"

namespace diffsched {

namespace {

using ojson = nlohmann::ordered_json;
using steady = std::chrono::steady_clock;

void put_double(std::string& out, double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  out.append(buf, end);
}

template <class T>
T get_number(std::string_view field, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size())
    throw ParseError("trajectory line " + std::to_string(line) + ": bad number \"" + std::string(field) + "\"");
  return v;
}

std::int64_t ms_since(steady::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(steady::now() - t0).count();
}

// A timestamped objective value produced by some method.
struct Event {
  std::int64_t at_ms;
  double objective;
};

// Best value visible at each sampling point; before the first event the
// first event's value stands in.
std::vector<double> sample_running_best(std::vector<Event> events, const std::vector<std::int64_t>& points) {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at_ms < b.at_ms; });
  std::vector<double> out;
  out.reserve(points.size());
  double best = events.front().objective;
  std::size_t k = 0;
  for (std::int64_t t : points) {
    for (; k < events.size() && events[k].at_ms <= t; ++k) best = std::min(best, events[k].objective);
    out.push_back(best);
  }
  return out;
}

std::vector<double> normalize(const std::vector<double>& raw) {
  if (raw.front() <= 0.0) return std::vector<double>(raw.size(), 1.0);
  return normalized_progress(raw);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string schedule_to_json(const SchedGraph& g, const Schedule& s, int latency, double ratio) {
  const DiscreteMetrics m = discrete_metrics(g, s, latency, ratio);
  ojson j;
  j["L"] = latency;
  ojson stages = ojson::object();
  for (std::size_t v = 0; v < g.num_nodes(); ++v) stages[g.node(v).id] = s.stage[v];
  j["stages"] = std::move(stages);
  j["metrics"] = {{"peak_mem", m.peak_mem}, {"comm_total", m.comm_total}, {"lp_objective", m.lp_objective},
                  {"ratio", ratio}};
  return j.dump() + "\n";
}

ScheduleFile schedule_from_json(const SchedGraph& g, std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schedule JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("L") || !j["L"].is_number_integer() || !j.contains("stages") ||
      !j["stages"].is_object())
    throw ParseError("schedule JSON: expected an object with integer \"L\" and object \"stages\"");

  ScheduleFile f;
  f.latency = j["L"].get<int>();
  f.schedule.stage.assign(g.num_nodes(), 0);
  std::vector<bool> seen(g.num_nodes(), false);
  for (const auto& [id, value] : j["stages"].items()) {
    const auto v = g.index_of(id);
    if (!v) throw ParseError("schedule JSON: unknown node \"" + id + "\"");
    if (!value.is_number_integer()) throw ParseError("schedule JSON: stage of \"" + id + "\" is not an integer");
    f.schedule.stage[*v] = value.get<int>();
    seen[*v] = true;
  }
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    if (!seen[v]) throw ParseError("schedule JSON: no stage for node \"" + g.node(v).id + "\"");

  if (j.contains("metrics")) {
    const auto& m = j["metrics"];
    if (!m.is_object()) throw ParseError("schedule JSON: \"metrics\" must be an object");
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!m.contains(key)) return std::nullopt;
      if (!m[key].is_number()) throw ParseError(std::string("schedule JSON: metrics.") + key + " is not a number");
      return m[key].get<double>();
    };
    f.peak_mem = opt("peak_mem");
    f.comm_total = opt("comm_total");
    f.lp_objective = opt("lp_objective");
    f.ratio = opt("ratio");
  }
  return f;
}

// ---------------------------------------------------------------------------

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& trajectory) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const TrajectoryPoint& p : trajectory) {
    out += std::to_string(p.epoch);
    out += ',';
    out += std::to_string(p.wall_ms);
    for (double x : {p.loss_total, p.loss_entropy, p.loss_comm, p.peak_mem, p.comm_total, p.lp_objective,
                     p.best_so_far}) {
      out += ',';
      put_double(out, x);
    }
    out += '\n';
  }
  return out;
}

std::vector<TrajectoryPoint> trajectory_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trajectory: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) throw ParseError("trajectory: unexpected header \"" + line + "\"");

  std::vector<TrajectoryPoint> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9) throw ParseError("trajectory line " + std::to_string(lineno) + ": expected 9 fields");
    TrajectoryPoint p;
    p.epoch = get_number<int>(f[0], lineno);
    p.wall_ms = get_number<std::int64_t>(f[1], lineno);
    p.loss_total = get_number<double>(f[2], lineno);
    p.loss_entropy = get_number<double>(f[3], lineno);
    p.loss_comm = get_number<double>(f[4], lineno);
    p.peak_mem = get_number<double>(f[5], lineno);
    p.comm_total = get_number<double>(f[6], lineno);
    p.lp_objective = get_number<double>(f[7], lineno);
    p.best_so_far = get_number<double>(f[8], lineno);
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Diff: return "diff";
    case Method::Asap: return "asap";
    case Method::Alap: return "alap";
    case Method::Greedy: return "greedy";
    case Method::Oracle: return "oracle";
  }
  return "unknown";
}

std::optional<Method> method_from_name(std::string_view name) {
  for (Method m : {Method::Diff, Method::Asap, Method::Alap, Method::Greedy, Method::Oracle})
    if (method_name(m) == name) return m;
  return std::nullopt;
}

CompareConfig paper_compare_preset() {
  CompareConfig c;
  c.sample_interval_ms = 360000;
  c.timeout_ms = 10 * c.sample_interval_ms;
  c.run.epochs = std::numeric_limits<int>::max();
  return c;
}

std::vector<std::int64_t> sampling_points(std::int64_t timeout_ms, std::int64_t interval_ms) {
  if (timeout_ms < 0) throw std::invalid_argument("timeout_ms must be >= 0");
  if (interval_ms <= 0) throw std::invalid_argument("sample_interval_ms must be positive");
  std::vector<std::int64_t> pts;
  for (std::int64_t t = 0; t <= timeout_ms; t += interval_ms) pts.push_back(t);
  return pts;
}

ExperimentReport compare(const SchedGraph& g, const CompareConfig& config) {
  if (config.seeds < 1) throw std::invalid_argument("seeds must be >= 1");
  validate_config(config.run);
  const int L = config.run.latency;
  const double ratio = config.run.ratio;
  const int min_latency = min_feasible_latency(g);
  if (L < min_latency)
    throw InfeasibleError("latency " + std::to_string(L) + " is below the minimum feasible latency " +
                              std::to_string(min_latency),
                          min_latency);

  ExperimentReport report;
  report.note =
      "Baselines are local heuristics (ASAP, ALAP, greedy) and an exact branch-and-bound oracle for small "
      "instances; no commercial ILP or CP solver was run.";
  report.config = config;
  report.time_ms = sampling_points(config.timeout_ms, config.sample_interval_ms);

  const auto t0 = steady::now();
  auto finish = [&](MethodSeries& s, const std::vector<Event>& events) {
    s.best_objective = sample_running_best(events, report.time_ms);
    s.normalized = normalize(s.best_objective);
  };

  // Long-running methods first, on their own threads.
  std::vector<std::vector<Event>> diff_events(static_cast<std::size_t>(config.seeds));
  std::vector<RunResult> diff_results(static_cast<std::size_t>(config.seeds));
  std::vector<Event> oracle_events;
  std::optional<OracleResult> oracle_result;
  std::string oracle_note;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.seeds) + 1);
  std::vector<std::thread> workers;

  const bool want_diff = std::count(config.methods.begin(), config.methods.end(), Method::Diff) > 0;
  const bool want_oracle = std::count(config.methods.begin(), config.methods.end(), Method::Oracle) > 0;
  if (want_diff) {
    for (int k = 0; k < config.seeds; ++k) {
      workers.emplace_back([&, k] {
        const auto slot = static_cast<std::size_t>(k);
        try {
          RunConfig rc = config.run;
          rc.seed = config.run.seed + static_cast<std::uint64_t>(k);
          rc.timeout_ms = config.timeout_ms;
          diff_results[slot] = run(g, rc, [&](const EpochRecord& r) {
            diff_events[slot].push_back(Event{ms_since(t0), r.metrics.lp_objective});
          });
        } catch (...) {
          errors[slot] = std::current_exception();
        }
      });
    }
  }
  if (want_oracle) {
    workers.emplace_back([&] {
      try {
        oracle_result = brute_force(g, L, ratio, [&](const Schedule&, double obj) {
          oracle_events.push_back(Event{ms_since(t0), obj});
        });
      } catch (const std::length_error& e) {
        oracle_note = e.what();
      } catch (...) {
        errors.back() = std::current_exception();
      }
    });
  }

  // Heuristics are instantaneous.
  std::vector<MethodSeries> heuristics;
  for (Method m : config.methods) {
    if (m == Method::Diff || m == Method::Oracle) continue;
    MethodSeries s;
    s.method = m;
    s.schedule = m == Method::Asap ? asap(g, L) : m == Method::Alap ? alap(g, L) : greedy_balance(g, L, ratio);
    s.final_objective = discrete_metrics(g, s.schedule, L, ratio).lp_objective;
    finish(s, {Event{ms_since(t0), s.final_objective}});
    heuristics.push_back(std::move(s));
  }

  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (Method m : config.methods) {
    if (m == Method::Diff) {
      MethodSeries s;
      s.method = m;
      std::vector<Event> merged;
      for (const auto& ev : diff_events) merged.insert(merged.end(), ev.begin(), ev.end());
      finish(s, merged);
      const auto best = std::min_element(diff_results.begin(), diff_results.end(), [](const auto& a, const auto& b) {
        return a.best_objective < b.best_objective;
      });
      s.final_objective = best->best_objective;
      s.schedule = best->best_schedule;
      s.note = std::to_string(config.seeds) + " restart(s)";
      report.series.push_back(std::move(s));
    } else if (m == Method::Oracle) {
      MethodSeries s;
      s.method = m;
      if (!oracle_result) {
        s.skipped = true;
        s.note = oracle_note;
      } else {
        finish(s, oracle_events);
        s.final_objective = oracle_result->objective;
        s.schedule = oracle_result->schedule;
        s.note = std::to_string(oracle_result->leaves) + " leaves";
      }
      report.series.push_back(std::move(s));
    } else {
      auto it = std::find_if(heuristics.begin(), heuristics.end(), [&](const MethodSeries& h) { return h.method == m; });
      report.series.push_back(*it);
    }
  }
  return report;
}

std::string report_to_json(const SchedGraph& g, const ExperimentReport& report) {
  const ShapeStats st = shape_stats(g);
  const RunConfig& rc = report.config.run;
  ojson j;
  j["note"] = report.note;
  j["graph"] = {{"nodes", st.n_nodes}, {"edges", st.n_edges}, {"depth", st.depth},
                {"avg_out_degree", st.avg_out_degree}, {"min_latency", min_feasible_latency(g)}};
  j["config"] = {{"L", rc.latency},
                 {"ratio", rc.ratio},
                 {"lambda", rc.lambda},
                 {"epochs", rc.epochs},
                 {"lr", rc.lr},
                 {"tau_start", rc.tau_start},
                 {"tau_end", rc.tau_end},
                 {"optimizer", rc.optimizer == OptimizerKind::AdamW ? "adamw" : "adam"},
                 {"weight_decay", rc.weight_decay},
                 {"seed", rc.seed},
                 {"seeds", report.config.seeds},
                 {"timeout_ms", report.config.timeout_ms},
                 {"sample_interval_ms", report.config.sample_interval_ms}};
  j["environment"] = {{"hardware_threads", std::thread::hardware_concurrency()},
#if defined(__VERSION__)
                      {"compiler", __VERSION__}
#else
                      {"compiler", "unknown"}
#endif
  };
  j["time_ms"] = report.time_ms;
  ojson methods = ojson::array();
  for (const MethodSeries& s : report.series) {
    ojson m;
    m["method"] = method_name(s.method);
    m["skipped"] = s.skipped;
    m["note"] = s.note;
    if (!s.skipped) {
      m["best_objective"] = s.best_objective;
      m["normalized"] = s.normalized;
      m["final_objective"] = s.final_objective;
      ojson stages = ojson::object();
      for (std::size_t v = 0; v < g.num_nodes(); ++v) stages[g.node(v).id] = s.schedule.stage[v];
      m["stages"] = std::move(stages);
    }
    methods.push_back(std::move(m));
  }
  j["methods"] = std::move(methods);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "method,sample_index,time_ms,best_objective,normalized\n";
  for (const MethodSeries& s : report.series) {
    if (s.skipped) continue;
    for (std::size_t k = 0; k < s.best_objective.size(); ++k) {
      out += method_name(s.method);
      out += ',' + std::to_string(k) + ',' + std::to_string(report.time_ms[k]) + ',';
      put_double(out, s.best_objective[k]);
      out += ',';
      put_double(out, s.normalized[k]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace diffsched
