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

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "diffsched/graph.hpp"
#include "json.hpp"

namespace diffsched {

using nlohmann::json;

namespace {

double number_field(const json& obj, const char* key, double fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ParseError(where + ": field \"" + key + "\" must be a number");
  return it->get<double>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw ParseError(where + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

double parse_double(std::string_view tok, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line) + ": bad number \"" + std::string(tok) + "\"");
  return v;
}

int parse_int(std::string_view tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line) + ": bad integer \"" + std::string(tok) + "\"");
  return v;
}

}  // namespace

RawGraph parse_graph_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph JSON must be an object");

  RawGraph g;
  if (auto it = doc.find("nodes"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("\"nodes\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& n = (*it)[i];
      const std::string where = "nodes[" + std::to_string(i) + "]";
      if (!n.is_object()) throw ParseError(where + " must be an object");
      g.nodes.push_back(Node{string_field(n, "id", where), number_field(n, "mem", 1.0, where)});
    }
  }
  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("\"edges\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ParseError(where + " must be an object");
      Edge edge{string_field(e, "src", where), string_field(e, "dst", where),
                number_field(e, "comm", 1.0, where), 0};
      if (auto c = e.find("c"); c != e.end()) {
        if (!c->is_number_integer()) throw ParseError(where + ": field \"c\" must be an integer");
        edge.sdc_c = c->get<int>();
      }
      g.edges.push_back(std::move(edge));
    }
  }
  return g;
}

RawGraph parse_edge_list(std::string_view text) {
  RawGraph g;
  std::unordered_set<std::string> seen;
  auto add_node = [&](const std::string& id) {
    if (seen.insert(id).second) g.nodes.push_back(Node{id, 1.0});
  };

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 2 || tok.size() > 4)
      throw ParseError("line " + std::to_string(lineno) + ": expected `src dst [comm] [c]`");
    Edge e{tok[0], tok[1], 1.0, 0};
    if (tok.size() >= 3) e.comm = parse_double(tok[2], lineno);
    if (tok.size() == 4) e.sdc_c = parse_int(tok[3], lineno);
    add_node(e.src);
    add_node(e.dst);
    g.edges.push_back(std::move(e));
  }
  return g;
}

SchedGraph load_graph(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{')
    return SchedGraph::from_raw(parse_graph_json(text));
  return SchedGraph::from_raw(parse_edge_list(text));
}

SchedGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_graph(buf.str());
}

std::string save_graph(const RawGraph& g) {
  // One node or edge per line keeps large files diffable.
  std::string out = "{\"nodes\":[";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    nlohmann::ordered_json n = {{"id", g.nodes[i].id}, {"mem", g.nodes[i].mem}};
    out += (i ? ",\n " : "\n ");
    out += n.dump();
  }
  out += "\n],\"edges\":[";
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    nlohmann::ordered_json j = {{"src", e.src}, {"dst", e.dst}, {"comm", e.comm}, {"c", e.sdc_c}};
    out += (i ? ",\n " : "\n ");
    out += j.dump();
  }
  out += "\n]}\n";
  return out;
}

std::string save_graph(const SchedGraph& g) { return save_graph(g.to_raw()); }

}  // namespace diffsched
