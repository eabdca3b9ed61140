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

// Brute-force ground truth for desk-scale instances: the optimal adaptive
// policy by backward induction, exact set values over the action space, the
// concave and multilinear extensions, the relaxation optimum, and exact
// policy evaluation over a discretized world space.

#ifndef COUPON_PROBING_ORACLE_H_
#define COUPON_PROBING_ORACLE_H_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "coupon_probing/influence.h"
#include "coupon_probing/lp.h"
#include "coupon_probing/model.h"
#include "coupon_probing/relaxation.h"

namespace coupon_probing {

struct OracleLimits {
  int max_users = 4;
  int max_coupons = 3;
  int max_probe_cap = 2;
};

// max over adaptive policies of E[I(seeds)], subject to redeemed <= B,
// at most K offers per user, optionally at most W probed users, and (when
// `restricted`) each user probed in one contiguous block of rounds.
//
// A user's information state is (offers used, largest rejected coupon,
// accepted coupon); given a rejection of c', accepting c has conditional
// probability (p_c - p_c') / (1 - p_c'). The budget is a function of the
// accepted coupons, so states are keyed without floating point.
class AdaptiveOracle {
 public:
  AdaptiveOracle(const Instance& instance, bool restricted, bool use_user_cap,
                 const OracleLimits& limits = {})
      : instance_(instance),
        restricted_(restricted),
        user_cap_(use_user_cap ? instance.user_cap() : std::nullopt),
        table_(CheckedTable(instance, limits)) {
    if (use_user_cap && !instance.user_cap()) {
      throw ProbingError("user cap requested but the instance has no W");
    }
    const int n = instance.user_count();
    count_.assign(n, 0);
    rejected_.assign(n, -1);
    accepted_.assign(n, -1);
  }

  double Value() { return Solve(-1); }
  std::size_t states_visited() const { return memo_.size(); }

  // Pr[accept coupon | largest rejected so far]; `rejected` < 0 means none.
  static double ConditionalAccept(const Instance& instance, NodeId v, int coupon,
                                  int rejected) {
    const double p = instance.attractiveness(v, coupon);
    if (rejected < 0) return p;
    const double base = instance.attractiveness(v, rejected);
    if (base >= 1.0) return 0.0;
    return std::max(0.0, p - base) / (1.0 - base);
  }

 private:
  static ExactInfluenceTable CheckedTable(const Instance& instance,
                                          const OracleLimits& limits) {
    if (instance.user_count() > limits.max_users ||
        instance.coupon_count() > limits.max_coupons ||
        instance.probe_cap() > limits.max_probe_cap) {
      std::ostringstream msg;
      msg << "adaptive oracle is limited to |V| <= " << limits.max_users
          << ", |C| <= " << limits.max_coupons << ", K <= "
          << limits.max_probe_cap << "; instance has |V| = "
          << instance.user_count() << ", |C| = " << instance.coupon_count()
          << ", K = " << instance.probe_cap();
      throw SizeLimitError(msg.str());
    }
    return ExactInfluenceTable(instance.graph());
  }

  uint64_t Key(int current) const {
    const uint64_t k1 = instance_.probe_cap() + 1;
    const uint64_t m1 = instance_.coupon_count() + 1;
    uint64_t key = restricted_ ? static_cast<uint64_t>(current + 1) : 0;
    for (int v = 0; v < instance_.user_count(); ++v) {
      const uint64_t code = count_[v] + k1 * (rejected_[v] + 1) +
                            k1 * m1 * (accepted_[v] + 1);
      key = key * (k1 * m1 * m1) + code;
    }
    return key;
  }

  double Solve(int current) {
    const uint64_t key = Key(current);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const int n = instance_.user_count();
    uint32_t seed_mask = 0;
    double spent = 0.0;
    int probed = 0;
    for (int v = 0; v < n; ++v) {
      if (accepted_[v] >= 0) {
        seed_mask |= uint32_t{1} << v;
        spent += instance_.coupon(accepted_[v]);
      }
      if (count_[v] > 0) ++probed;
    }
    const double remaining = instance_.budget() - spent;
    const double slack = kBudgetSlack * instance_.budget();
    double best = table_(seed_mask);

    for (int v = 0; v < n; ++v) {
      if (accepted_[v] >= 0 || count_[v] >= instance_.probe_cap()) continue;
      if (restricted_ && v != current && count_[v] > 0) continue;
      if (count_[v] == 0 && user_cap_ && probed >= *user_cap_) continue;
      for (int c = 0; c < instance_.coupon_count(); ++c) {
        if (instance_.coupon(c) > remaining + slack) break;
        const double q = ConditionalAccept(instance_, v, c, rejected_[v]);
        if (q <= 0.0) continue;
        ++count_[v];
        accepted_[v] = c;
        double value = q * Solve(v);
        accepted_[v] = -1;
        if (q < 1.0) {
          const int old = rejected_[v];
          rejected_[v] = std::max(old, c);
          value += (1.0 - q) * Solve(v);
          rejected_[v] = old;
        }
        --count_[v];
        best = std::max(best, value);
      }
    }
    memo_.emplace(key, best);
    return best;
  }

  const Instance& instance_;
  bool restricted_;
  std::optional<int> user_cap_;
  ExactInfluenceTable table_;
  std::vector<int> count_;
  std::vector<int> rejected_;
  std::vector<int> accepted_;
  std::unordered_map<uint64_t, double> memo_;
};

inline double OptimalAdaptiveValue(const Instance& instance, bool restricted,
                                   bool use_user_cap) {
  AdaptiveOracle oracle(instance, restricted, use_user_cap);
  return oracle.Value();
}

inline constexpr int kMaxExactActions = 12;

// E_world[f(X)] for every subset X of the action space, indexed by bitmask.
inline std::vector<double> ExactActionSetValues(const Instance& instance,
                                                const ActionSpace& space) {
  if (space.size() > kMaxExactActions) {
    throw SizeLimitError("exact set values need |S| <= " +
                         std::to_string(kMaxExactActions) + ", got " +
                         std::to_string(space.size()));
  }
  const ExactInfluenceTable influence(instance.graph());
  const int n = instance.user_count();
  const uint32_t subsets = uint32_t{1} << space.size();
  std::vector<double> values(subsets, 0.0);
  std::vector<double> accept(n);
  std::vector<double> weight(std::size_t{1} << n);
  for (uint32_t x = 1; x < subsets; ++x) {
    std::vector<int> best(n, -1);
    for (int a = 0; a < space.size(); ++a) {
      if ((x >> a) & 1) {
        const NodeId v = space.user_of(a);
        best[v] = std::max(best[v], space.sequence(space.sequence_of(a)).back());
      }
    }
    for (int v = 0; v < n; ++v) {
      accept[v] = best[v] >= 0 ? instance.attractiveness(v, best[v]) : 0.0;
    }
    weight[0] = 1.0;
    for (int v = 0; v < n; ++v) weight[0] *= 1.0 - accept[v];
    double total = 0.0;
    for (uint32_t u = 1; u < weight.size(); ++u) {
      double w = 1.0;
      for (int v = 0; v < n && w != 0.0; ++v) {
        w *= (u >> v) & 1 ? accept[v] : 1.0 - accept[v];
      }
      total += w * influence(u);
    }
    values[x] = total;
  }
  return values;
}

// F(y) = sum_X prod_{a in X} y_a prod_{a not in X} (1 - y_a) f(X).
inline double MultilinearExact(std::span<const double> set_values,
                               const DecisionMatrix& y) {
  double total = 0.0;
  for (uint32_t x = 0; x < set_values.size(); ++x) {
    double w = 1.0;
    for (int a = 0; a < y.size() && w != 0.0; ++a) {
      w *= (x >> a) & 1 ? y[a] : 1.0 - y[a];
    }
    total += w * set_values[x];
  }
  return total;
}

// f+(y) = max sum_X alpha_X f(X)  s.t.  alpha >= 0, sum alpha <= 1,
//         sum_{X containing a} alpha_X <= y_a for every action a.
inline double ConcaveExtensionExact(std::span<const double> set_values,
                                    const DecisionMatrix& y) {
  const int actions = y.size();
  if (actions > kMaxExactActions) throw SizeLimitError("concave extension needs |S| <= 12");
  const uint32_t subsets = uint32_t{1} << actions;
  if (set_values.size() != subsets) throw ProbingError("set values do not match y");
  std::vector<double> objective(subsets - 1);
  std::vector<std::vector<double>> rows(actions + 1, std::vector<double>(subsets - 1, 0.0));
  std::vector<double> rhs(actions + 1);
  for (uint32_t x = 1; x < subsets; ++x) {
    objective[x - 1] = set_values[x];
    rows[0][x - 1] = 1.0;
    for (int a = 0; a < actions; ++a) {
      if ((x >> a) & 1) rows[a + 1][x - 1] = 1.0;
    }
  }
  rhs[0] = 1.0;
  for (int a = 0; a < actions; ++a) rhs[a + 1] = std::max(0.0, y[a]);
  return SolvePackingLp(objective, rows, rhs).objective;
}

// Optimum of the relaxed problem: max f+(y) over per-user mass <= 1,
// sum b.y <= B (and sum y <= W). Taking y_a = sum_{X containing a} alpha_X
// turns it into one LP in alpha.
inline double RelaxationOptimum(const Instance& instance, const ActionSpace& space,
                                std::span<const double> set_values,
                                std::span<const double> costs, bool use_user_cap) {
  const int actions = space.size();
  const uint32_t subsets = uint32_t{1} << actions;
  if (set_values.size() != subsets) throw ProbingError("set values do not match S");
  const int n = instance.user_count();
  std::vector<double> objective(subsets - 1);
  std::vector<std::vector<double>> rows(n + 2 + (use_user_cap ? 1 : 0),
                                        std::vector<double>(subsets - 1, 0.0));
  std::vector<double> rhs(rows.size(), 1.0);
  rhs[n + 1] = instance.budget();
  if (use_user_cap) rhs[n + 2] = *instance.user_cap();
  for (uint32_t x = 1; x < subsets; ++x) {
    objective[x - 1] = set_values[x];
    rows[n][x - 1] = 1.0;
    for (int a = 0; a < actions; ++a) {
      if (((x >> a) & 1) == 0) continue;
      rows[space.user_of(a)][x - 1] += 1.0;
      rows[n + 1][x - 1] += costs[a];
      if (use_user_cap) rows[n + 2][x - 1] += 1.0;
    }
  }
  return SolvePackingLp(objective, rows, rhs).objective;
}

inline constexpr int kMaxExactPolicyEdges = 12;
inline constexpr uint64_t kMaxThresholdCells = uint64_t{1} << 22;

// Exact f(pi) for a deterministic policy whose choices depend only on the
// accept/reject outcomes. Each threshold only matters through which interval
// of {0, p[v][0], ..., p[v][m-1], 1} it falls in, so the world space is a
// finite product of intervals; the cascade is averaged out exactly.
template <typename TraceGenerator>
double ExactPolicyValue(const Instance& instance, TraceGenerator&& generate) {
  const int n = instance.user_count();
  if (static_cast<int>(instance.graph().uncertain_edges().size()) >
      kMaxExactPolicyEdges) {
    throw SizeLimitError("exact policy value needs at most " +
                         std::to_string(kMaxExactPolicyEdges) + " random edges");
  }
  // Per user: representative threshold (cell upper end) and cell length.
  std::vector<std::vector<std::pair<double, double>>> cells(n);
  uint64_t combos = 1;
  for (int v = 0; v < n; ++v) {
    std::vector<double> cuts = instance.attractiveness()[v];
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double lo = 0.0;
    for (double hi : cuts) {
      if (hi > lo) cells[v].emplace_back(hi, hi - lo);
      lo = hi;
    }
    combos *= cells[v].size();
    if (combos > kMaxThresholdCells) {
      throw SizeLimitError("exact policy value: too many threshold cells");
    }
  }
  const ExactInfluenceTable influence(instance.graph());
  World world;
  world.thresholds.assign(n, 1.0);
  world.cascade.live.assign(instance.graph().edge_count(), 0);
  std::vector<std::size_t> idx(n, 0);
  Rng unused(0);
  double total = 0.0;
  for (uint64_t k = 0; k < combos; ++k) {
    double weight = 1.0;
    for (int v = 0; v < n; ++v) {
      world.thresholds[v] = cells[v][idx[v]].first;
      weight *= cells[v][idx[v]].second;
    }
    const PolicyTrace trace = generate(world, unused);
    total += weight * influence(trace.seeds);
    for (int v = 0; v < n; ++v) {
      if (++idx[v] < cells[v].size()) break;
      idx[v] = 0;
    }
  }
  return total;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_ORACLE_H_
