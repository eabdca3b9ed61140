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

// Fractional relaxation over the action space: the utility of a set of
// actions in one world, multilinear marginal estimates, the per-step linear
// program, and the continuous greedy loop that accumulates its solutions.

#ifndef COUPON_PROBING_RELAXATION_H_
#define COUPON_PROBING_RELAXATION_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "coupon_probing/influence.h"
#include "coupon_probing/lp.h"
#include "coupon_probing/model.h"
#include "coupon_probing/random.h"

namespace coupon_probing {

// y over the action space, indexed by action id.
struct DecisionMatrix {
  std::vector<double> values;

  double operator[](int action) const { return values[action]; }
  double& operator[](int action) { return values[action]; }
  int size() const { return static_cast<int>(values.size()); }
};

inline double UserMass(const ActionSpace& space, const DecisionMatrix& y,
                       NodeId user) {
  double mass = 0.0;
  for (int s = 0; s < space.sequence_count(); ++s) mass += y[space.id(user, s)];
  return mass;
}

inline double TotalMass(const DecisionMatrix& y) {
  double mass = 0.0;
  for (double v : y.values) mass += v;
  return mass;
}

inline double Dot(std::span<const double> a, const DecisionMatrix& y) {
  double s = 0.0;
  for (int i = 0; i < y.size(); ++i) s += a[i] * y[i];
  return s;
}

// Maximizer of beta (1 - beta)(1 - 2 beta) on [0, 1/2].
inline double DefaultBeta() { return (3.0 - std::sqrt(3.0)) / 6.0; }

inline double BasicRatioFactor(double beta) {
  return beta * (1.0 - beta) * (1.0 - 2.0 * beta);
}

inline double ExtendedRatioFactor(double beta) {
  return beta * (1.0 - beta) * (1.0 - beta) * (1.0 - 2.0 * beta);
}

// Maximizer of beta (1 - beta)^2 (1 - 2 beta) on [0, 1/2], by golden-section
// search (the factor is unimodal there).
inline double ExtendedDefaultBeta() {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 0.5;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = ExtendedRatioFactor(x1), f2 = ExtendedRatioFactor(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = ExtendedRatioFactor(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = ExtendedRatioFactor(x1);
    }
  }
  return (lo + hi) / 2.0;
}

// Guaranteed fraction of the optimum for the randomized combiner.
inline double ApproximationRatio(double beta, bool extended) {
  const double factor =
      extended ? ExtendedRatioFactor(beta) : BasicRatioFactor(beta);
  return (1.0 - std::exp(-1.0)) * factor / 2.0;
}

// 1 / (|V| |Psi|)^2; prohibitive beyond toy sizes, so callers usually
// override it. A coarser step loses O(delta |S|^2 max f) of the continuous
// greedy guarantee.
inline double DefaultDelta(const ActionSpace& space) {
  const double s = static_cast<double>(space.size());
  return s > 0 ? 1.0 / (s * s) : 1.0;
}

struct RelaxationConfig {
  double beta = DefaultBeta();
  std::optional<double> delta;  // defaults to DefaultDelta(space)
  int64_t marginal_samples = 2000;
  uint64_t rng_seed = 0;
  CostMode cost_mode = CostMode::kThresholdConsistent;
};

inline std::vector<double> ActionCosts(const Instance& instance,
                                       const ActionSpace& space,
                                       CostMode mode) {
  std::vector<double> costs(space.size());
  for (int a = 0; a < space.size(); ++a) {
    costs[a] = ExpectedCost(instance, space.action(a), mode);
  }
  return costs;
}

// f(X) in one world: user v is a seed iff sigma_v <= p[v][best coupon among
// v's sequences in X]. Budget and probe caps are not applied.
inline double ActionSetUtility(const Instance& instance, const ActionSpace& space,
                               std::span<const int> actions, const World& world) {
  std::vector<int> best(instance.user_count(), -1);
  for (int a : actions) {
    const NodeId v = space.user_of(a);
    best[v] = std::max(best[v], space.sequence(space.sequence_of(a)).back());
  }
  SeedSet seeds;
  for (NodeId v = 0; v < instance.user_count(); ++v) {
    if (best[v] >= 0 && Realize(instance, world, v, best[v])) seeds.push_back(v);
  }
  return ReachableCount(instance.graph(), world.cascade, seeds);
}

// omega[a] ~ E[f(R + a)] - E[f(R)], R containing each action independently
// with probability y[a]. Sample s of call `iteration` uses the stream
// (rng_seed, iteration, s); worlds and R are shared by all actions.
inline std::vector<double> EstimateMarginals(const Instance& instance,
                                             const ActionSpace& space,
                                             const DecisionMatrix& y,
                                             const RelaxationConfig& config,
                                             uint64_t iteration = 0) {
  if (config.marginal_samples < 1) {
    throw ProbingError("marginal estimation needs at least one sample");
  }
  const int n = instance.user_count();
  const Graph& graph = instance.graph();
  std::vector<double> omega(space.size(), 0.0);
  std::vector<int> best(n);
  std::vector<uint8_t> is_seed(n);
  std::vector<double> user_gain(n);
  std::vector<uint8_t> visited;
  std::vector<NodeId> stack;
  SeedSet seeds;
  for (int64_t s = 0; s < config.marginal_samples; ++s) {
    Rng rng = StreamRng(config.rng_seed, {iteration, static_cast<uint64_t>(s)});
    const World world = SampleWorld(instance, rng);
    std::fill(best.begin(), best.end(), -1);
    for (int a = 0; a < space.size(); ++a) {
      if (Bernoulli(rng, y[a])) {
        const NodeId v = space.user_of(a);
        best[v] = std::max(best[v], space.sequence(space.sequence_of(a)).back());
      }
    }
    seeds.clear();
    for (NodeId v = 0; v < n; ++v) {
      is_seed[v] = best[v] >= 0 && Realize(instance, world, v, best[v]);
      if (is_seed[v]) seeds.push_back(v);
    }
    auto live = [&](int e) { return world.cascade.live[e] != 0; };
    const int base = ReachableCount(graph, seeds, live, visited, stack);
    std::fill(user_gain.begin(), user_gain.end(), -1.0);
    for (int a = 0; a < space.size(); ++a) {
      const NodeId v = space.user_of(a);
      if (is_seed[v]) continue;
      const int top = space.sequence(space.sequence_of(a)).back();
      if (!Realize(instance, world, v, top)) continue;
      if (user_gain[v] < 0.0) {
        SeedSet with_v = seeds;
        with_v.push_back(v);
        user_gain[v] = ReachableCount(graph, with_v, live, visited, stack) - base;
      }
      omega[a] += user_gain[v];
    }
  }
  for (double& w : omega) w /= static_cast<double>(config.marginal_samples);
  return omega;
}

// Optimal solution of
//   max sum w.y  s.t.  per-user mass <= 1,  sum b.y <= beta B,
//                      (use_user_cap) sum y <= beta W,  0 <= y <= 1.
inline DecisionMatrix SolveRelaxationLp(const Instance& instance,
                                        const ActionSpace& space,
                                        std::span<const double> weights,
                                        std::span<const double> costs,
                                        double beta, bool use_user_cap) {
  if (!(beta >= 0.0 && beta <= 0.5)) throw ProbingError("beta must lie in [0, 1/2]");
  if (static_cast<int>(weights.size()) != space.size() ||
      static_cast<int>(costs.size()) != space.size()) {
    throw ProbingError("weights and costs must cover the action space");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw ProbingError("non-finite marginal weight");
  }
  if (use_user_cap && !instance.user_cap()) {
    throw ProbingError("user cap requested but the instance has no W");
  }
  // Non-positive weights are zero at an optimum of a packing LP.
  std::vector<int> columns;
  for (int a = 0; a < space.size(); ++a) {
    if (weights[a] > 0.0) columns.push_back(a);
  }
  DecisionMatrix y{std::vector<double>(space.size(), 0.0)};
  if (columns.empty()) return y;
  const int cols = static_cast<int>(columns.size());
  std::vector<double> objective(cols);
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<int> user_row(instance.user_count(), -1);
  for (int j = 0; j < cols; ++j) {
    objective[j] = weights[columns[j]];
    const NodeId v = space.user_of(columns[j]);
    if (user_row[v] < 0) {
      user_row[v] = static_cast<int>(rows.size());
      rows.emplace_back(cols, 0.0);
      rhs.push_back(1.0);
    }
    rows[user_row[v]][j] = 1.0;
  }
  std::vector<double> budget_row(cols);
  for (int j = 0; j < cols; ++j) budget_row[j] = costs[columns[j]];
  rows.push_back(std::move(budget_row));
  rhs.push_back(beta * instance.budget());
  if (use_user_cap) {
    rows.emplace_back(cols, 1.0);
    rhs.push_back(beta * *instance.user_cap());
  }
  const LpSolution solution = SolvePackingLp(objective, rows, rhs);
  for (int j = 0; j < cols; ++j) y[columns[j]] = solution.x[j];
  return y;
}

// Observer invoked after each continuous greedy step with (step, y(t)).
using GreedyObserver = std::function<void(int, const DecisionMatrix&)>;

// Runs ceil(1/delta) steps of size 1/ceil(1/delta), so y^g is an exact
// average of LP solutions and inherits their feasibility.
inline DecisionMatrix ContinuousGreedy(const Instance& instance,
                                       const ActionSpace& space,
                                       const RelaxationConfig& config,
                                       bool use_user_cap,
                                       const GreedyObserver& observer = {}) {
  if (space.empty()) throw ProbingError("continuous greedy needs a non-empty action space");
  const double delta = config.delta.value_or(DefaultDelta(space));
  if (!(delta > 0.0 && delta <= 1.0)) throw ProbingError("delta must lie in (0, 1]");
  const int steps = static_cast<int>(std::ceil(1.0 / delta - 1e-9));
  const double step = 1.0 / steps;
  const std::vector<double> costs = ActionCosts(instance, space, config.cost_mode);
  DecisionMatrix y{std::vector<double>(space.size(), 0.0)};
  for (int t = 0; t < steps; ++t) {
    const std::vector<double> omega =
        EstimateMarginals(instance, space, y, config, static_cast<uint64_t>(t));
    const DecisionMatrix direction = SolveRelaxationLp(
        instance, space, omega, costs, config.beta, use_user_cap);
    for (int a = 0; a < space.size(); ++a) y[a] += step * direction[a];
    if (observer) observer(t, y);
  }
  // Round-off repair: shrink towards 0 until every packing row holds.
  double shrink = 1.0;
  auto tighten = [&](double lhs, double limit) {
    if (lhs > limit) shrink = std::min(shrink, limit / lhs);
  };
  for (NodeId v = 0; v < instance.user_count(); ++v) tighten(UserMass(space, y, v), 1.0);
  tighten(Dot(costs, y), config.beta * instance.budget());
  if (use_user_cap) tighten(TotalMass(y), config.beta * *instance.user_cap());
  if (shrink < 1.0) {
    for (double& v : y.values) v = std::min(1.0, v * shrink * (1.0 - 1e-15));
  }
  for (double& v : y.values) v = std::clamp(v, 0.0, 1.0);
  return y;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_RELAXATION_H_
