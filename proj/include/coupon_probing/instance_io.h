// Copyright 2026 The Coupon Probing Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text instance files.
//
//   # comment
//   [graph]
//   nodes 5
//   edge 0 1 0.5            # source target probability
//   [coupons]
//   1 2                     # strictly increasing values
//   [attractiveness]
//   0.3 0.6                 # one row per user, one entry per coupon
//   ...
//   [constraints]
//   K 1
//   B 3
//   W 2                     # optional
//
// Blank lines and text after '#' are ignored. Sections may appear in any
// order but each at most once.

#ifndef COUPON_PROBING_INSTANCE_IO_H_
#define COUPON_PROBING_INSTANCE_IO_H_

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coupon_probing/influence.h"
#include "coupon_probing/model.h"

namespace coupon_probing {

class ParseError : public ProbingError {
 public:
  ParseError(const std::string& source, int line, const std::string& message)
      : ProbingError(source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace internal {

inline std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream in(line.substr(0, line.find('#')));
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

inline double ParseReal(const std::string& token, const std::string& source,
                        int line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || !std::isfinite(value)) {
    throw ParseError(source, line, "expected a number, got '" + token + "'");
  }
  return value;
}

inline long long ParseInteger(const std::string& token, const std::string& source,
                              int line) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    throw ParseError(source, line, "expected an integer, got '" + token + "'");
  }
  return value;
}

}  // namespace internal

inline Instance ParseInstance(std::istream& in, const std::string& source = "<input>") {
  using internal::ParseInteger;
  using internal::ParseReal;
  std::string section;
  std::map<std::string, int> section_line;
  std::optional<int> nodes;
  std::vector<Edge> edges;
  std::vector<int> edge_lines;
  std::vector<double> coupons;
  int coupon_line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  std::map<std::string, std::pair<std::string, int>> constraints;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::vector<std::string> tok = internal::Tokens(raw);
    if (tok.empty()) continue;
    if (tok[0].front() == '[') {
      if (tok.size() != 1 || tok[0].back() != ']') {
        throw ParseError(source, line, "malformed section header");
      }
      section = tok[0].substr(1, tok[0].size() - 2);
      if (section != "graph" && section != "coupons" &&
          section != "attractiveness" && section != "constraints") {
        throw ParseError(source, line, "unknown section '" + section + "'");
      }
      if (section_line.count(section)) {
        throw ParseError(source, line, "section '" + section + "' repeated");
      }
      section_line[section] = line;
      continue;
    }
    if (section.empty()) throw ParseError(source, line, "content before any section");
    if (section == "graph") {
      if (tok[0] == "nodes" && tok.size() == 2) {
        if (nodes) throw ParseError(source, line, "node count given twice");
        const long long n = ParseInteger(tok[1], source, line);
        if (n <= 0 || n > std::numeric_limits<int>::max()) {
          throw ParseError(source, line, "node count must be positive");
        }
        nodes = static_cast<int>(n);
      } else if (tok[0] == "edge" && tok.size() == 4) {
        Edge e;
        e.source = static_cast<int>(ParseInteger(tok[1], source, line));
        e.target = static_cast<int>(ParseInteger(tok[2], source, line));
        e.prob = ParseReal(tok[3], source, line);
        edges.push_back(e);
        edge_lines.push_back(line);
      } else {
        throw ParseError(source, line,
                         "expected 'nodes <n>' or 'edge <source> <target> <prob>'");
      }
    } else if (section == "coupons") {
      if (coupon_line == 0) coupon_line = line;
      for (const auto& t : tok) {
        const double c = ParseReal(t, source, line);
        if (!(c > 0.0)) throw ParseError(source, line, "coupon values must be positive");
        if (!coupons.empty() && !(c > coupons.back())) {
          throw ParseError(source, line, "coupon values must be strictly increasing");
        }
        coupons.push_back(c);
      }
    } else if (section == "attractiveness") {
      std::vector<double> row;
      for (const auto& t : tok) row.push_back(ParseReal(t, source, line));
      rows.push_back(std::move(row));
      row_lines.push_back(line);
    } else {
      if (tok.size() != 2 || (tok[0] != "K" && tok[0] != "B" && tok[0] != "W")) {
        throw ParseError(source, line, "expected 'K <int>', 'B <real>' or 'W <int>'");
      }
      if (constraints.count(tok[0])) {
        throw ParseError(source, line, tok[0] + " given twice");
      }
      constraints[tok[0]] = {tok[1], line};
    }
  }

  for (const char* s : {"graph", "coupons", "attractiveness", "constraints"}) {
    if (!section_line.count(s)) {
      throw ParseError(source, line, std::string("missing section [") + s + "]");
    }
  }
  if (!nodes) throw ParseError(source, section_line["graph"], "missing 'nodes <n>'");
  if (coupons.empty()) throw ParseError(source, section_line["coupons"], "no coupons");
  std::map<std::pair<int, int>, int> seen_edges;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    if (edge.source < 0 || edge.source >= *nodes || edge.target < 0 ||
        edge.target >= *nodes) {
      throw ParseError(source, edge_lines[e], "edge references an unknown node");
    }
    if (edge.source == edge.target) {
      throw ParseError(source, edge_lines[e], "self-loops are not allowed");
    }
    if (!(edge.prob >= 0.0 && edge.prob <= 1.0)) {
      throw ParseError(source, edge_lines[e], "edge probability outside [0, 1]");
    }
    auto [it, fresh] = seen_edges.emplace(std::pair{edge.source, edge.target}, edge_lines[e]);
    if (!fresh) {
      throw ParseError(source, edge_lines[e],
                       "duplicate edge (first given on line " +
                           std::to_string(it->second) + ")");
    }
  }
  if (static_cast<int>(rows.size()) != *nodes) {
    throw ParseError(source, section_line["attractiveness"],
                     "expected " + std::to_string(*nodes) + " rows, got " +
                         std::to_string(rows.size()));
  }
  for (std::size_t v = 0; v < rows.size(); ++v) {
    const auto& row = rows[v];
    if (row.size() != coupons.size()) {
      throw ParseError(source, row_lines[v],
                       "user " + std::to_string(v) + " needs " +
                           std::to_string(coupons.size()) + " entries");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!(row[c] >= 0.0 && row[c] <= 1.0)) {
        throw ParseError(source, row_lines[v], "attractiveness outside [0, 1]");
      }
      if (c > 0 && row[c] < row[c - 1]) {
        std::ostringstream msg;
        msg << "user " << v << " is not rational: coupon " << coupons[c - 1]
            << " has attractiveness " << row[c - 1] << " but larger coupon "
            << coupons[c] << " has " << row[c];
        throw ParseError(source, row_lines[v], msg.str());
      }
    }
  }
  auto need = [&](const char* key) -> std::pair<std::string, int> {
    auto it = constraints.find(key);
    if (it == constraints.end()) {
      throw ParseError(source, section_line["constraints"],
                       std::string("missing constraint ") + key);
    }
    return it->second;
  };
  const auto [k_text, k_line] = need("K");
  const long long k = ParseInteger(k_text, source, k_line);
  if (k < 0 || k > std::numeric_limits<int>::max()) {
    throw ParseError(source, k_line, "K must be a non-negative integer");
  }
  const auto [b_text, b_line] = need("B");
  const double b = ParseReal(b_text, source, b_line);
  if (!(b > 0.0)) throw ParseError(source, b_line, "B must be positive");
  std::optional<int> w;
  if (auto it = constraints.find("W"); it != constraints.end()) {
    const long long wv = ParseInteger(it->second.first, source, it->second.second);
    if (wv < 0 || wv > std::numeric_limits<int>::max()) {
      throw ParseError(source, it->second.second, "W must be a non-negative integer");
    }
    w = static_cast<int>(wv);
  }
  return Instance(Graph(*nodes, std::move(edges)), std::move(coupons),
                  std::move(rows), static_cast<int>(k), b, w);
}

inline Instance LoadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProbingError("cannot open instance file '" + path + "'");
  return ParseInstance(in, path);
}

inline void WriteInstance(std::ostream& out, const Instance& instance) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "[graph]\nnodes " << instance.user_count() << "\n";
  for (const Edge& e : instance.graph().edges()) {
    out << "edge " << e.source << " " << e.target << " " << e.prob << "\n";
  }
  out << "[coupons]\n";
  for (int c = 0; c < instance.coupon_count(); ++c) {
    out << (c ? " " : "") << instance.coupon(c);
  }
  out << "\n[attractiveness]\n";
  for (const auto& row : instance.attractiveness()) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << row[c];
    out << "\n";
  }
  out << "[constraints]\nK " << instance.probe_cap() << "\nB " << instance.budget()
      << "\n";
  if (instance.user_cap()) out << "W " << *instance.user_cap() << "\n";
  out.precision(old_precision);
}

inline std::string InstanceToString(const Instance& instance) {
  std::ostringstream out;
  WriteInstance(out, instance);
  return out.str();
}

inline void SaveInstance(const std::string& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw ProbingError("cannot write instance file '" + path + "'");
  WriteInstance(out, instance);
}

inline bool SameInstance(const Instance& a, const Instance& b) {
  return a.graph().node_count() == b.graph().node_count() &&
         a.graph().edges() == b.graph().edges() && a.coupons() == b.coupons() &&
         a.attractiveness() == b.attractiveness() &&
         a.probe_cap() == b.probe_cap() && a.budget() == b.budget() &&
         a.user_cap() == b.user_cap();
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_INSTANCE_IO_H_
