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

#include "diffsched/ilp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace diffsched {

namespace {

constexpr std::size_t kWrapColumn = 200;

bool lp_safe(std::string_view id) {
  if (id.empty() || !(std::isalpha(static_cast<unsigned char>(id[0])) || id[0] == '_')) return false;
  return std::all_of(id.begin(), id.end(),
                     [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
}

// LP-safe name per node: the id itself when every id qualifies and the
// resulting names are unambiguous, otherwise n<index> for all nodes.
std::vector<std::string> node_names(const SchedGraph& g) {
  std::vector<std::string> names;
  names.reserve(g.num_nodes());
  bool ok = true;
  for (const Node& n : g.nodes()) {
    ok = ok && lp_safe(n.id);
    names.push_back(n.id);
  }
  if (!ok) {
    for (std::size_t v = 0; v < names.size(); ++v) names[v] = "n" + std::to_string(v);
  }
  return names;
}

std::string sel_name(const std::string& node, int stage) { return "s_" + node + "_" + std::to_string(stage); }
std::string val_name(const std::string& node) { return "t_" + node; }
std::string prod_name(std::size_t edge, int boundary) {
  return "y_" + std::to_string(edge) + "_" + std::to_string(boundary);
}

std::string format_number(double x) {
  if (x == std::floor(x) && std::fabs(x) < 1e15) return std::to_string(static_cast<long long>(x));
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
  if (ec != std::errc()) throw std::runtime_error("format_number: value out of range");
  return std::string(buf, end);
}

double parse_number(std::string_view tok) {
  if (tok == "inf" || tok == "+inf" || tok == "infinity") return INFINITY;
  if (tok == "-inf" || tok == "-infinity") return -INFINITY;
  const char* first = tok.data();
  if (!tok.empty() && tok[0] == '+') ++first;
  double v = 0.0;
  auto [p, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) throw ParseError("LP: bad number \"" + std::string(tok) + "\"");
  return v;
}

bool looks_numeric(std::string_view tok) {
  if (tok.empty()) return false;
  std::size_t i = (tok[0] == '-' || tok[0] == '+') ? 1 : 0;
  return i < tok.size() && (std::isdigit(static_cast<unsigned char>(tok[i])) || tok[i] == '.' || tok.substr(i) == "inf");
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::LessEq: return "<=";
    case Sense::GreaterEq: return ">=";
    case Sense::Equal: return "=";
  }
  return "=";
}

void append_terms(std::string& out, const IlpModel& m, const std::vector<IlpTerm>& terms, std::size_t& col) {
  if (terms.empty()) {
    out += " 0";
    col += 2;
    return;
  }
  bool first = true;
  for (const IlpTerm& t : terms) {
    std::string piece;
    const double mag = std::fabs(t.coef);
    if (t.coef < 0) piece += first ? "- " : " - ";
    else piece += first ? "" : " + ";
    if (mag != 1.0) piece += format_number(mag) + " ";
    piece += m.vars.at(t.var).name;
    if (col + piece.size() > kWrapColumn) {
      out += "\n  ";
      col = 2;
    } else if (first) {
      out += " ";
      ++col;
    }
    out += piece;
    col += piece.size();
    first = false;
  }
}

}  // namespace

std::optional<std::size_t> IlpModel::find_var(std::string_view name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return i;
  return std::nullopt;
}

std::size_t IlpModel::add_var(std::string name, VarKind kind, double lower, std::optional<double> upper) {
  vars.push_back(IlpVar{std::move(name), kind, lower, upper});
  return vars.size() - 1;
}

IlpModel export_ilp(const SchedGraph& g, int stages, double ratio) {
  if (stages < 1) throw std::invalid_argument("export_ilp: stages must be >= 1");
  const auto names = node_names(g);
  const std::size_t n = g.num_nodes();
  const auto L = static_cast<std::size_t>(stages);
  IlpModel m;

  std::vector<std::vector<std::size_t>> sel(n, std::vector<std::size_t>(L));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t j = 0; j < L; ++j) sel[v][j] = m.add_var(sel_name(names[v], static_cast<int>(j)), VarKind::Binary, 0.0, 1.0);
  std::vector<std::size_t> val(n);
  for (std::size_t v = 0; v < n; ++v) val[v] = m.add_var(val_name(names[v]), VarKind::Integer, 0.0, stages - 1.0);
  const std::size_t peak = m.add_var("r", VarKind::Continuous);
  std::vector<std::size_t> stage_mem(L);
  for (std::size_t j = 0; j < L; ++j) stage_mem[j] = m.add_var("r_" + std::to_string(j), VarKind::Continuous);
  std::vector<std::size_t> boundary;
  if (g.num_edges() > 0)
    for (std::size_t i = 0; i + 1 < L; ++i) boundary.push_back(m.add_var("m_" + std::to_string(i), VarKind::Continuous));

  // Exactly one stage per node, and the integer stage value.
  for (std::size_t v = 0; v < n; ++v) {
    IlpRow row{"sel_" + names[v], {}, Sense::Equal, 1.0};
    for (std::size_t j = 0; j < L; ++j) row.terms.push_back({sel[v][j], 1.0});
    m.rows.push_back(std::move(row));
  }
  for (std::size_t v = 0; v < n; ++v) {
    IlpRow row{"val_" + names[v], {{val[v], 1.0}}, Sense::Equal, 0.0};
    for (std::size_t j = 1; j < L; ++j) row.terms.push_back({sel[v][j], -static_cast<double>(j)});
    m.rows.push_back(std::move(row));
  }
  // Difference constraints t_src - t_dst <= c.
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const IndexedEdge& edge = g.edges()[e];
    m.rows.push_back(IlpRow{"dep_" + std::to_string(e), {{val[edge.src], 1.0}, {val[edge.dst], -1.0}}, Sense::LessEq,
                            static_cast<double>(edge.sdc_c)});
  }
  // Stage memory and peak.
  for (std::size_t j = 0; j < L; ++j) {
    IlpRow row{"mem_" + std::to_string(j), {{stage_mem[j], 1.0}}, Sense::Equal, 0.0};
    for (std::size_t v = 0; v < n; ++v)
      if (g.node(v).mem != 0.0) row.terms.push_back({sel[v][j], -g.node(v).mem});
    m.rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < L; ++j)
    m.rows.push_back(IlpRow{"peak_" + std::to_string(j), {{stage_mem[j], 1.0}, {peak, -1.0}}, Sense::LessEq, 0.0});

  // Boundary crossings: y = [src <= i] * [dst >= i+1], linearized.
  std::vector<IlpRow> comm_rows;
  for (std::size_t i = 0; i < boundary.size(); ++i)
    comm_rows.push_back(IlpRow{"comm_" + std::to_string(i), {{boundary[i], 1.0}}, Sense::Equal, 0.0});
  std::vector<IlpRow> lin_rows;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const IndexedEdge& edge = g.edges()[e];
    for (std::size_t i = 0; i < boundary.size(); ++i) {
      const std::size_t y = m.add_var(prod_name(e, static_cast<int>(i)), VarKind::Binary, 0.0, 1.0);
      const std::string tag = std::to_string(e) + "_" + std::to_string(i);
      IlpRow lo{"ylo_" + tag, {{y, 1.0}}, Sense::LessEq, 0.0};
      IlpRow hi{"yhi_" + tag, {{y, 1.0}}, Sense::LessEq, 0.0};
      IlpRow both{"ysum_" + tag, {{y, 1.0}}, Sense::GreaterEq, -1.0};
      for (std::size_t a = 0; a <= i; ++a) {
        lo.terms.push_back({sel[edge.src][a], -1.0});
        both.terms.push_back({sel[edge.src][a], -1.0});
      }
      for (std::size_t h = i + 1; h < L; ++h) {
        hi.terms.push_back({sel[edge.dst][h], -1.0});
        both.terms.push_back({sel[edge.dst][h], -1.0});
      }
      lin_rows.push_back(std::move(lo));
      lin_rows.push_back(std::move(hi));
      lin_rows.push_back(std::move(both));
      if (edge.comm != 0.0) comm_rows[i].terms.push_back({y, -edge.comm});
    }
  }
  for (auto& r : comm_rows) m.rows.push_back(std::move(r));
  for (auto& r : lin_rows) m.rows.push_back(std::move(r));

  for (std::size_t b : boundary) m.objective.push_back({b, 1.0});
  m.objective.push_back({peak, ratio});
  return m;
}

std::string to_lp_text(const IlpModel& m) {
  std::string out = "\\ diffsched schedule model\nMinimize\n obj:";
  std::size_t col = 5;
  append_terms(out, m, m.objective, col);
  out += "\nSubject To\n";
  for (const IlpRow& r : m.rows) {
    out += " " + r.name + ":";
    col = r.name.size() + 2;
    append_terms(out, m, r.terms, col);
    out += " ";
    out += sense_text(r.sense);
    out += " " + format_number(r.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const IlpVar& v : m.vars) {
    if (v.kind == VarKind::Binary) continue;
    if (v.upper) out += " " + format_number(v.lower) + " <= " + v.name + " <= " + format_number(*v.upper) + "\n";
    else if (v.lower != 0.0) out += " " + v.name + " >= " + format_number(v.lower) + "\n";
  }
  auto list = [&](VarKind kind, const char* heading) {
    bool any = false;
    col = 0;
    for (const IlpVar& v : m.vars) {
      if (v.kind != kind) continue;
      if (!any) out += heading;
      any = true;
      if (col + v.name.size() + 1 > kWrapColumn) {
        out += "\n";
        col = 0;
      }
      out += " " + v.name;
      col += v.name.size() + 1;
    }
    if (any) out += "\n";
  };
  list(VarKind::Integer, "General\n");
  list(VarKind::Binary, "Binary\n");
  out += "End\n";
  return out;
}

IlpModel parse_lp_text(std::string_view text) {
  enum class Section { None, Objective, Rows, Bounds, General, Binary, Done };
  Section section = Section::None;
  std::vector<std::string> objective_tokens, row_tokens;
  std::vector<std::vector<std::string>> bound_lines;
  std::vector<std::string> general, binary;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '\\') continue;
    std::string trimmed = line.substr(first);
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
    if (trimmed == "Minimize") { section = Section::Objective; continue; }
    if (trimmed == "Subject To") { section = Section::Rows; continue; }
    if (trimmed == "Bounds") { section = Section::Bounds; continue; }
    if (trimmed == "General" || trimmed == "Generals") { section = Section::General; continue; }
    if (trimmed == "Binary" || trimmed == "Binaries") { section = Section::Binary; continue; }
    if (trimmed == "End") { section = Section::Done; continue; }

    std::istringstream fields(trimmed);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    switch (section) {
      case Section::Objective: objective_tokens.insert(objective_tokens.end(), tok.begin(), tok.end()); break;
      case Section::Rows: row_tokens.insert(row_tokens.end(), tok.begin(), tok.end()); break;
      case Section::Bounds: bound_lines.push_back(tok); break;
      case Section::General: general.insert(general.end(), tok.begin(), tok.end()); break;
      case Section::Binary: binary.insert(binary.end(), tok.begin(), tok.end()); break;
      default: throw ParseError("LP: content outside any section: \"" + trimmed + "\"");
    }
  }
  if (section != Section::Done) throw ParseError("LP: missing End");

  IlpModel m;
  std::unordered_map<std::string, std::size_t> index;
  auto var = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const std::size_t id = m.add_var(name, VarKind::Continuous);
    index.emplace(name, id);
    return id;
  };
  for (const auto& name : general) m.vars[var(name)].kind = VarKind::Integer;
  for (const auto& name : binary) {
    auto& v = m.vars[var(name)];
    v.kind = VarKind::Binary;
    v.upper = 1.0;
  }

  // Parses `[+|-] [coef] var ...` from tok[pos] until a sense token or the end.
  auto parse_terms = [&](const std::vector<std::string>& tok, std::size_t& pos) {
    std::vector<IlpTerm> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (; pos < tok.size(); ++pos) {
      const std::string& t = tok[pos];
      if (t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>") break;
      if (t.back() == ':' ) break;
      if (t == "+") { sign = 1.0; continue; }
      if (t == "-") { sign = -1.0; continue; }
      if (looks_numeric(t)) {
        coef = parse_number(t);
        have_coef = true;
        continue;
      }
      terms.push_back({var(t), sign * (have_coef ? coef : 1.0)});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    if (have_coef && !(coef == 0.0 && terms.empty())) throw ParseError("LP: dangling coefficient");
    return terms;
  };

  std::size_t pos = 0;
  if (!objective_tokens.empty() && objective_tokens[0].back() == ':') ++pos;
  m.objective = parse_terms(objective_tokens, pos);

  pos = 0;
  while (pos < row_tokens.size()) {
    IlpRow row;
    if (row_tokens[pos].back() != ':') throw ParseError("LP: unnamed row near \"" + row_tokens[pos] + "\"");
    row.name = row_tokens[pos].substr(0, row_tokens[pos].size() - 1);
    ++pos;
    row.terms = parse_terms(row_tokens, pos);
    if (pos >= row_tokens.size()) throw ParseError("LP: row " + row.name + " lacks a sense");
    const std::string& s = row_tokens[pos++];
    row.sense = (s == "<=" || s == "=<") ? Sense::LessEq : (s == ">=" || s == "=>") ? Sense::GreaterEq : Sense::Equal;
    if (pos >= row_tokens.size()) throw ParseError("LP: row " + row.name + " lacks a right-hand side");
    double sign = 1.0;
    if (row_tokens[pos] == "-" || row_tokens[pos] == "+") sign = row_tokens[pos++] == "-" ? -1.0 : 1.0;
    row.rhs = sign * parse_number(row_tokens.at(pos++));
    m.rows.push_back(std::move(row));
  }

  for (const auto& b : bound_lines) {
    if (b.size() == 5 && b[1] == "<=" && b[3] == "<=") {
      auto& v = m.vars[var(b[2])];
      v.lower = parse_number(b[0]);
      v.upper = parse_number(b[4]);
    } else if (b.size() == 3 && b[1] == ">=") {
      m.vars[var(b[0])].lower = parse_number(b[2]);
    } else if (b.size() == 3 && b[1] == "<=") {
      m.vars[var(b[0])].upper = parse_number(b[2]);
    } else {
      throw ParseError("LP: unsupported bound line");
    }
  }
  return m;
}

IlpCheck check_ilp_assignment(const IlpModel& model, const std::map<std::string, double>& assignment, double tol) {
  std::vector<double> x(model.vars.size());
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    auto it = assignment.find(model.vars[i].name);
    if (it == assignment.end()) throw std::out_of_range("missing variable " + model.vars[i].name);
    x[i] = it->second;
  }

  IlpCheck out;
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    const IlpVar& v = model.vars[i];
    bool ok = x[i] >= v.lower - tol && (!v.upper || x[i] <= *v.upper + tol);
    if (v.kind != VarKind::Continuous) ok = ok && std::fabs(x[i] - std::round(x[i])) <= tol;
    if (!ok) out.violated.push_back("bounds:" + v.name);
  }
  for (const IlpRow& r : model.rows) {
    double lhs = 0.0;
    for (const IlpTerm& t : r.terms) lhs += t.coef * x[t.var];
    bool ok = true;
    switch (r.sense) {
      case Sense::LessEq: ok = lhs <= r.rhs + tol; break;
      case Sense::GreaterEq: ok = lhs >= r.rhs - tol; break;
      case Sense::Equal: ok = std::fabs(lhs - r.rhs) <= tol; break;
    }
    if (!ok) out.violated.push_back(r.name);
  }
  for (const IlpTerm& t : model.objective) out.objective += t.coef * x[t.var];
  out.feasible = out.violated.empty();
  return out;
}

std::map<std::string, double> ilp_assignment_from_schedule(const SchedGraph& g, int stages, const Schedule& s) {
  if (s.stage.size() != g.num_nodes()) throw std::invalid_argument("schedule size differs from node count");
  const auto names = node_names(g);
  const auto L = static_cast<std::size_t>(stages);
  std::map<std::string, double> a;
  std::vector<double> stage_mem(L, 0.0);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const int st = s.stage[v];
    for (std::size_t j = 0; j < L; ++j) a[sel_name(names[v], static_cast<int>(j))] = static_cast<int>(j) == st ? 1.0 : 0.0;
    a[val_name(names[v])] = st;
    if (st >= 0 && static_cast<std::size_t>(st) < L) stage_mem[static_cast<std::size_t>(st)] += g.node(v).mem;
  }
  double peak = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    a["r_" + std::to_string(j)] = stage_mem[j];
    peak = std::max(peak, stage_mem[j]);
  }
  a["r"] = peak;
  if (g.num_edges() > 0) {
    std::vector<double> crossing(L > 0 ? L - 1 : 0, 0.0);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const IndexedEdge& edge = g.edges()[e];
      for (std::size_t i = 0; i + 1 < L; ++i) {
        const int b = static_cast<int>(i);
        const double y = (s.stage[edge.src] <= b && s.stage[edge.dst] >= b + 1) ? 1.0 : 0.0;
        a[prod_name(e, b)] = y;
        crossing[i] += edge.comm * y;
      }
    }
    for (std::size_t i = 0; i < crossing.size(); ++i) a["m_" + std::to_string(i)] = crossing[i];
  }
  return a;
}

}  // namespace diffsched
