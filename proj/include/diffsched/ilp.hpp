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

// Integer linear program for latency-constrained min-resource scheduling.
//
// Variables
//   s_<node>_<j>   binary, node placed on stage j
//   t_<node>       integer stage value, t = sum_j j * s_<node>_<j>
//   r_<j>          memory on stage j;  r  peak memory
//   m_<i>          cost crossing boundary i | i+1
//   y_<e>_<i>      binary, edge e crosses boundary i (McCormick product of
//                  "src at <= i" and "dst at >= i+1")
// Objective: minimize sum_i m_i + ratio * r.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffsched/graph.hpp"

namespace diffsched {

enum class VarKind { Binary, Integer, Continuous };
enum class Sense { LessEq, GreaterEq, Equal };

struct IlpVar {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  std::optional<double> upper;  // none: unbounded above
};

struct IlpTerm {
  std::size_t var;
  double coef;
};

struct IlpRow {
  std::string name;
  std::vector<IlpTerm> terms;
  Sense sense = Sense::LessEq;
  double rhs = 0.0;
};

struct IlpModel {
  std::vector<IlpVar> vars;
  std::vector<IlpRow> rows;
  std::vector<IlpTerm> objective;  // minimized

  std::optional<std::size_t> find_var(std::string_view name) const;
  std::size_t add_var(std::string name, VarKind kind, double lower = 0.0, std::optional<double> upper = std::nullopt);
};

/// Builds the full model for `g` on `stages` stages with peak-memory weight
/// `ratio`. Rows are named sel_*, val_*, dep_*, mem_*, peak_*, comm_*, and
/// ylo_*/yhi_*/ysum_* for the product linearization.
IlpModel export_ilp(const SchedGraph& g, int stages, double ratio);

/// CPLEX LP file text (Minimize / Subject To / Bounds / General / Binary / End).
/// Numbers are rendered in plain decimal without exponents.
std::string to_lp_text(const IlpModel& model);

/// Reads the subset of the LP grammar that to_lp_text emits. Throws ParseError.
IlpModel parse_lp_text(std::string_view text);

struct IlpCheck {
  bool feasible = false;
  double objective = 0.0;
  std::vector<std::string> violated;  // row names, or "bounds:<var>"
};

/// Evaluates every row, bound and integrality requirement at `assignment`.
/// Throws std::out_of_range naming the first variable missing from it.
IlpCheck check_ilp_assignment(const IlpModel& model, const std::map<std::string, double>& assignment,
                              double tolerance = 1e-9);

/// Values of every model variable implied by a hard schedule, with the
/// auxiliary y products set consistently. Works for illegal schedules too, so
/// that infeasibility can be demonstrated.
std::map<std::string, double> ilp_assignment_from_schedule(const SchedGraph& g, int stages, const Schedule& s);

}  // namespace diffsched
