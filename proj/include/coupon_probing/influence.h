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

// Directed influence graph under the independent cascade model, with exact
// (live-edge enumeration) and Monte Carlo estimators of expected influence.

#ifndef COUPON_PROBING_INFLUENCE_H_
#define COUPON_PROBING_INFLUENCE_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coupon_probing/random.h"

namespace coupon_probing {

using NodeId = int;

// Sorted, duplicate-free list of node ids.
using SeedSet = std::vector<NodeId>;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  double prob = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One live-edge realization: live[e] != 0 iff edge e transmits.
struct CascadeRealization {
  std::vector<uint8_t> live;
};

// Enumeration is 2^k over the k edges whose probability is strictly between
// 0 and 1; deterministic edges do not contribute to the enumeration.
inline constexpr int kMaxEnumeratedEdges = 20;

class Graph {
 public:
  Graph() = default;

  Graph(int node_count, std::vector<Edge> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ <= 0) throw ProbingError("graph needs at least one node");
    out_.assign(node_count_, {});
    std::vector<std::pair<NodeId, NodeId>> seen;
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      const Edge& edge = edges_[e];
      if (edge.source < 0 || edge.source >= node_count_ || edge.target < 0 ||
          edge.target >= node_count_) {
        throw ProbingError("edge " + std::to_string(e) +
                           " references an unknown node");
      }
      if (edge.source == edge.target) {
        throw ProbingError("edge " + std::to_string(e) + " is a self-loop");
      }
      if (!(edge.prob >= 0.0 && edge.prob <= 1.0)) {
        throw ProbingError("edge " + std::to_string(e) +
                           " has probability outside [0, 1]");
      }
      seen.emplace_back(edge.source, edge.target);
      out_[edge.source].push_back(e);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw ProbingError("duplicate edge between the same ordered pair");
    }
  }

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const int> out_edges(NodeId v) const { return out_[v]; }

  // Indices of edges with probability in (0, 1).
  std::vector<int> uncertain_edges() const {
    std::vector<int> result;
    for (int e = 0; e < edge_count(); ++e) {
      if (edges_[e].prob > 0.0 && edges_[e].prob < 1.0) result.push_back(e);
    }
    return result;
  }

  void CheckSeeds(std::span<const NodeId> seeds) const {
    for (NodeId v : seeds) {
      if (v < 0 || v >= node_count_) {
        throw ProbingError("seed " + std::to_string(v) +
                           " is not a node of the graph");
      }
    }
  }

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
};

// Number of nodes reachable from `seeds` along edges for which
// `is_live(edge_index)` holds. `visited` and `stack` are scratch buffers.
template <typename LivePredicate>
int ReachableCount(const Graph& graph, std::span<const NodeId> seeds,
                   LivePredicate&& is_live, std::vector<uint8_t>& visited,
                   std::vector<NodeId>& stack) {
  visited.assign(graph.node_count(), 0);
  stack.clear();
  int count = 0;
  for (NodeId s : seeds) {
    if (!visited[s]) {
      visited[s] = 1;
      stack.push_back(s);
      ++count;
    }
  }
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (int e : graph.out_edges(u)) {
      const NodeId w = graph.edge(e).target;
      if (!visited[w] && is_live(e)) {
        visited[w] = 1;
        stack.push_back(w);
        ++count;
      }
    }
  }
  return count;
}

inline int ReachableCount(const Graph& graph, const CascadeRealization& cascade,
                          std::span<const NodeId> seeds) {
  std::vector<uint8_t> visited;
  std::vector<NodeId> stack;
  return ReachableCount(
      graph, seeds, [&](int e) { return cascade.live[e] != 0; }, visited,
      stack);
}

inline CascadeRealization SampleCascade(const Graph& graph, Rng& rng) {
  CascadeRealization cascade;
  cascade.live.resize(graph.edge_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    cascade.live[e] = Bernoulli(rng, graph.edge(e).prob) ? 1 : 0;
  }
  return cascade;
}

namespace internal {

// Visits every realization of the uncertain edges as (weight, is_live).
template <typename Visitor>
void ForEachLiveEdgeRealization(const Graph& graph, Visitor&& visit) {
  const std::vector<int> uncertain = graph.uncertain_edges();
  if (static_cast<int>(uncertain.size()) > kMaxEnumeratedEdges) {
    std::ostringstream msg;
    msg << "exact influence enumerates 2^" << uncertain.size()
        << " edge realizations; the limit is 2^" << kMaxEnumeratedEdges;
    throw SizeLimitError(msg.str());
  }
  std::vector<int> bit_of(graph.edge_count(), -1);
  for (int i = 0; i < static_cast<int>(uncertain.size()); ++i) {
    bit_of[uncertain[i]] = i;
  }
  const uint64_t total = uint64_t{1} << uncertain.size();
  for (uint64_t mask = 0; mask < total; ++mask) {
    double weight = 1.0;
    for (int i = 0; i < static_cast<int>(uncertain.size()); ++i) {
      const double p = graph.edge(uncertain[i]).prob;
      weight *= (mask >> i) & 1 ? p : 1.0 - p;
    }
    auto is_live = [&](int e) {
      const Edge& edge = graph.edge(e);
      if (bit_of[e] >= 0) return ((mask >> bit_of[e]) & 1) != 0;
      return edge.prob >= 1.0;
    };
    visit(weight, is_live);
  }
}

}  // namespace internal

// Expected number of nodes reached from `seeds`, by enumerating all live-edge
// realizations.
inline double InfluenceExact(const Graph& graph, std::span<const NodeId> seeds) {
  graph.CheckSeeds(seeds);
  if (seeds.empty()) return 0.0;
  std::vector<uint8_t> visited;
  std::vector<NodeId> stack;
  double total = 0.0;
  internal::ForEachLiveEdgeRealization(graph, [&](double w, auto&& is_live) {
    if (w == 0.0) return;
    total += w * ReachableCount(graph, seeds, is_live, visited, stack);
  });
  return total;
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo influence; sample i uses the stream (rng_seed, i).
inline Estimate InfluenceMonteCarlo(const Graph& graph,
                                    std::span<const NodeId> seeds,
                                    int64_t samples, uint64_t rng_seed) {
  if (samples < 1) throw ProbingError("influence needs at least one sample");
  graph.CheckSeeds(seeds);
  std::vector<uint8_t> visited;
  std::vector<NodeId> stack;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int64_t i = 0; i < samples; ++i) {
    Rng rng = StreamRng(rng_seed, {static_cast<uint64_t>(i)});
    auto is_live = [&](int e) { return Bernoulli(rng, graph.edge(e).prob); };
    // Each edge is examined at most once per traversal, so lazy flipping
    // samples the same distribution as flipping every edge up front.
    const double x = ReachableCount(graph, seeds, is_live, visited, stack);
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  double var = samples > 1 ? (sum_sq - n * mean * mean) / (n - 1.0) : 0.0;
  if (var < 0.0) var = 0.0;
  return {mean, std::sqrt(var / n)};
}

// Exact I(U) for every subset U of a small node set, indexed by bitmask.
class ExactInfluenceTable {
 public:
  static constexpr int kMaxNodes = 16;

  explicit ExactInfluenceTable(const Graph& graph) {
    const int n = graph.node_count();
    if (n > kMaxNodes) {
      throw SizeLimitError("exact influence table supports at most " +
                           std::to_string(kMaxNodes) + " nodes, got " +
                           std::to_string(n));
    }
    values_.assign(std::size_t{1} << n, 0.0);
    std::vector<uint32_t> reach(n);
    std::vector<uint32_t> union_reach(values_.size());
    std::vector<uint8_t> visited;
    std::vector<NodeId> stack;
    internal::ForEachLiveEdgeRealization(graph, [&](double w, auto&& is_live) {
      if (w == 0.0) return;
      for (NodeId v = 0; v < n; ++v) {
        const NodeId seed[] = {v};
        ReachableCount(graph, seed, is_live, visited, stack);
        uint32_t bits = 0;
        for (NodeId u = 0; u < n; ++u) {
          if (visited[u]) bits |= uint32_t{1} << u;
        }
        reach[v] = bits;
      }
      union_reach[0] = 0;
      for (std::size_t mask = 1; mask < values_.size(); ++mask) {
        const int low = std::countr_zero(mask);
        union_reach[mask] = union_reach[mask & (mask - 1)] | reach[low];
        values_[mask] += w * std::popcount(union_reach[mask]);
      }
    });
  }

  double operator()(uint32_t mask) const { return values_[mask]; }
  double operator()(std::span<const NodeId> seeds) const {
    uint32_t mask = 0;
    for (NodeId v : seeds) mask |= uint32_t{1} << v;
    return values_[mask];
  }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct MonteCarloParams {
  int64_t samples = 10000;
  uint64_t rng_seed = 0;
};

// Work bound (node-visits) under which singleton influences are enumerated.
inline constexpr double kExactSingletonWork = 1 << 27;

// I({v}) for every node: exact when enumeration is cheap, otherwise Monte
// Carlo with one shared cascade per sample across all nodes.
inline std::vector<double> SingletonInfluenceTable(const Graph& graph,
                                                   const MonteCarloParams& mc) {
  const int n = graph.node_count();
  const auto k = graph.uncertain_edges().size();
  const double work = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(k, 60))) *
                      n * (n + graph.edge_count());
  std::vector<double> table(n, 0.0);
  std::vector<uint8_t> visited;
  std::vector<NodeId> stack;
  if (static_cast<int>(k) <= kMaxEnumeratedEdges && work <= kExactSingletonWork) {
    internal::ForEachLiveEdgeRealization(graph, [&](double w, auto&& is_live) {
      if (w == 0.0) return;
      for (NodeId v = 0; v < n; ++v) {
        const NodeId seed[] = {v};
        table[v] += w * ReachableCount(graph, seed, is_live, visited, stack);
      }
    });
    return table;
  }
  if (mc.samples < 1) throw ProbingError("influence needs at least one sample");
  for (int64_t i = 0; i < mc.samples; ++i) {
    Rng rng = StreamRng(mc.rng_seed, {static_cast<uint64_t>(i)});
    const CascadeRealization cascade = SampleCascade(graph, rng);
    auto is_live = [&](int e) { return cascade.live[e] != 0; };
    for (NodeId v = 0; v < n; ++v) {
      const NodeId seed[] = {v};
      table[v] += ReachableCount(graph, seed, is_live, visited, stack);
    }
  }
  for (double& x : table) x /= static_cast<double>(mc.samples);
  return table;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_INFLUENCE_H_
