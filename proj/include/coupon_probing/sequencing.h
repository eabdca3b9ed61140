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

// Single-coupon sequencing policies that only offer the largest coupon: the
// greedy order, its closed-form value, the W-capped selection DP, and the
// fair-coin combiner with the rounding branch. Also policy evaluation by
// simulation over sampled worlds.

#ifndef COUPON_PROBING_SEQUENCING_H_
#define COUPON_PROBING_SEQUENCING_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coupon_probing/influence.h"
#include "coupon_probing/model.h"
#include "coupon_probing/random.h"
#include "coupon_probing/relaxation.h"
#include "coupon_probing/rounding.h"

namespace coupon_probing {

// Value of probing users in the given order with one coupon, stopping at the
// first accept: sum_i prod_{j<i} (1 - accept_j) accept_i influence_i.
template <typename Scalar>
Scalar ClosedFormValue(std::span<const Scalar> accept,
                       std::span<const Scalar> influence) {
  Scalar value(0);
  Scalar all_rejected(1);
  for (std::size_t i = 0; i < accept.size(); ++i) {
    value += all_rejected * accept[i] * influence[i];
    all_rejected *= Scalar(1) - accept[i];
  }
  return value;
}

// f[i][l]: best value from the i lowest-influence users with at most l
// probes. Inputs are sorted by non-increasing influence.
template <typename Scalar>
std::vector<std::vector<Scalar>> SelectionTable(std::span<const Scalar> accept,
                                                std::span<const Scalar> influence,
                                                int cap) {
  const int n = static_cast<int>(accept.size());
  std::vector<std::vector<Scalar>> f(n + 1, std::vector<Scalar>(cap + 1, Scalar(0)));
  for (int i = 1; i <= n; ++i) {
    const int u = n - i;
    for (int l = 0; l <= cap; ++l) {
      f[i][l] = f[i - 1][l];
      if (l == 0) continue;
      const Scalar take = accept[u] * influence[u] +
                          (Scalar(1) - accept[u]) * f[i - 1][l - 1];
      if (take > f[i][l]) f[i][l] = take;
    }
  }
  return f;
}

// Sorted positions (in the input order) chosen by the table, first probe first.
template <typename Scalar>
std::vector<int> SelectionTraceback(const std::vector<std::vector<Scalar>>& f,
                                    std::span<const Scalar> accept,
                                    std::span<const Scalar> influence, int cap) {
  const int n = static_cast<int>(accept.size());
  std::vector<int> picked;
  int l = cap;
  for (int i = n; i >= 1 && l > 0; --i) {
    const int u = n - i;
    const Scalar take = accept[u] * influence[u] +
                        (Scalar(1) - accept[u]) * f[i - 1][l - 1];
    if (take > f[i - 1][l]) {
      picked.push_back(u);
      --l;
    }
  }
  return picked;
}

struct ProbeOrder {
  std::vector<NodeId> users;
  int coupon = 0;
};

// All users by non-increasing I({v}), ties by id, with the largest coupon.
inline ProbeOrder SequencingPlan(const Instance& instance,
                                 std::span<const double> singleton) {
  ProbeOrder order;
  order.coupon = instance.max_coupon();
  order.users.resize(instance.user_count());
  std::iota(order.users.begin(), order.users.end(), 0);
  std::stable_sort(order.users.begin(), order.users.end(),
                   [&](NodeId a, NodeId b) { return singleton[a] > singleton[b]; });
  return order;
}

inline double SequencingValue(const Instance& instance, const ProbeOrder& order,
                              std::span<const double> singleton) {
  std::vector<double> accept, influence;
  for (NodeId v : order.users) {
    accept.push_back(instance.attractiveness(v, order.coupon));
    influence.push_back(singleton[v]);
  }
  return ClosedFormValue<double>(accept, influence);
}

inline bool SequencingDegenerate(const Instance& instance) {
  return instance.coupon(instance.max_coupon()) > instance.budget() ||
         instance.probe_cap() < 1;
}

inline PolicyTrace SequencingExecute(const Instance& instance,
                                     const ProbeOrder& order,
                                     const World& world) {
  if (SequencingDegenerate(instance)) {
    throw ProbingError(
        "sequencing branch unavailable: the largest coupon exceeds B or K = 0");
  }
  PolicyTrace trace;
  trace.branch = Branch::kSequencing;
  const Action single{0, {order.coupon}};
  for (NodeId v : order.users) {
    Action action = single;
    action.user = v;
    if (ProbeUser(instance, world, action, instance.budget() - trace.redeemed,
                  &trace)) {
      break;
    }
  }
  return trace;
}

struct DpTable {
  // values[i][l], i over the i lowest-influence users, l in 0..W.
  std::vector<std::vector<double>> values;
};

struct SelectionResult {
  DpTable table;
  ProbeOrder order;
  double value = 0.0;
};

// Best subset of at most `cap` users, probed by non-increasing influence.
inline SelectionResult SequencingSelection(const Instance& instance,
                                           std::span<const double> singleton,
                                           int cap) {
  if (cap < 1) throw ProbingError("selection needs W >= 1");
  const ProbeOrder all = SequencingPlan(instance, singleton);
  std::vector<double> accept, influence;
  for (NodeId v : all.users) {
    accept.push_back(instance.attractiveness(v, all.coupon));
    influence.push_back(singleton[v]);
  }
  SelectionResult result;
  result.table.values = SelectionTable<double>(accept, influence, cap);
  result.value = result.table.values.back()[cap];
  result.order.coupon = all.coupon;
  for (int pos : SelectionTraceback<double>(result.table.values, accept,
                                            influence, cap)) {
    result.order.users.push_back(all.users[pos]);
  }
  return result;
}

// Sequencing branch: all users by influence, or the W-capped selection.
class SequencingPolicy {
 public:
  SequencingPolicy(const Instance& instance, std::vector<double> singleton,
                   bool use_user_cap)
      : instance_(&instance), singleton_(std::move(singleton)) {
    if (use_user_cap) {
      if (!instance.user_cap()) {
        throw ProbingError("extended sequencing needs an instance with W");
      }
      if (*instance.user_cap() >= 1) {
        order_ = SequencingSelection(instance, singleton_, *instance.user_cap()).order;
      } else {
        order_.coupon = instance.max_coupon();
      }
    } else {
      order_ = SequencingPlan(instance, singleton_);
    }
  }

  bool degenerate() const { return SequencingDegenerate(*instance_); }
  const ProbeOrder& order() const { return order_; }
  const std::vector<double>& singleton() const { return singleton_; }
  double value() const { return SequencingValue(*instance_, order_, singleton_); }

  PolicyTrace Run(const World& world, Rng& /*rng*/) const {
    return SequencingExecute(*instance_, order_, world);
  }

 private:
  const Instance* instance_;
  std::vector<double> singleton_;
  ProbeOrder order_;
};

struct StochCpConfig {
  RelaxationConfig relaxation;
  MonteCarloParams influence;
};

// Fair coin between the rounding and sequencing branches, with the
// degenerate fallbacks: no low-value coupon forces sequencing, and a largest
// coupon of at most B/2 (or an unusable sequencing branch) forces rounding.
class StochCpPolicy {
 public:
  StochCpPolicy(const Instance& instance, const StochCpConfig& config,
                bool extended)
      : rounding_(instance, config.relaxation, extended),
        sequencing_(instance, SingletonInfluenceTable(instance.graph(), config.influence),
                    extended) {
    const double half = instance.budget() / 2;
    if (rounding_.vacuous() && sequencing_.degenerate()) {
      throw ProbingError(
          "instance is unsolvable by the combiner: no coupon is at most B/2 "
          "and the largest coupon exceeds B (or K = 0)");
    }
    if (rounding_.vacuous()) {
      forced_ = Branch::kSequencing;
    } else if (instance.coupon(instance.max_coupon()) <= half ||
               sequencing_.degenerate()) {
      forced_ = Branch::kRounding;
    }
  }

  // kNone when the coin is fair.
  Branch forced_branch() const { return forced_; }
  const RoundingPolicy& rounding() const { return rounding_; }
  const SequencingPolicy& sequencing() const { return sequencing_; }

  PolicyTrace Run(const World& world, Rng& rng) const {
    Branch branch = forced_;
    if (branch == Branch::kNone) {
      branch = Bernoulli(rng, 0.5) ? Branch::kRounding : Branch::kSequencing;
    }
    return branch == Branch::kRounding ? rounding_.Run(world, rng)
                                       : sequencing_.Run(world, rng);
  }

 private:
  RoundingPolicy rounding_;
  SequencingPolicy sequencing_;
  Branch forced_ = Branch::kNone;
};

inline PolicyTrace RunStochCp(const Instance& instance, const StochCpConfig& config,
                              bool extended, uint64_t rng_seed) {
  const StochCpPolicy policy(instance, config, extended);
  Rng world_rng = StreamRng(rng_seed, {0});
  Rng policy_rng = StreamRng(rng_seed, {1});
  const World world = SampleWorld(instance, world_rng);
  return policy.Run(world, policy_rng);
}

// Anything that maps a world (plus private randomness) to an executed trace.
using Policy = std::function<PolicyTrace(const World&, Rng&)>;

template <typename P>
Policy AsPolicy(const P& policy) {
  return [&policy](const World& world, Rng& rng) { return policy.Run(world, rng); };
}

struct PolicyEvaluation {
  double mean = 0.0;
  double std_error = 0.0;
  int64_t worlds = 0;
  FeasibilityReport violations;
  int64_t rounding_runs = 0;
  int64_t sequencing_runs = 0;
  int max_users_probed = 0;
};

// Mean influence of the traces' seed sets, each trace generated and scored
// in the same world. World i uses stream (rng_seed, i, 0) and the policy's
// own randomness uses (rng_seed, i, 1), so policies evaluated with one seed
// see identical worlds.
inline PolicyEvaluation EvaluatePolicy(const Instance& instance,
                                       const Policy& policy, int64_t worlds,
                                       uint64_t rng_seed,
                                       bool check_user_cap = false) {
  if (worlds < 1) throw ProbingError("evaluation needs at least one world");
  PolicyEvaluation eval;
  eval.worlds = worlds;
  std::vector<uint8_t> visited;
  std::vector<NodeId> stack;
  std::vector<uint8_t> probed(instance.user_count());
  double sum = 0.0, sum_sq = 0.0;
  for (int64_t i = 0; i < worlds; ++i) {
    Rng world_rng = StreamRng(rng_seed, {static_cast<uint64_t>(i), 0});
    Rng policy_rng = StreamRng(rng_seed, {static_cast<uint64_t>(i), 1});
    const World world = SampleWorld(instance, world_rng);
    const PolicyTrace trace = policy(world, policy_rng);
    const double x = ReachableCount(
        instance.graph(), trace.seeds,
        [&](int e) { return world.cascade.live[e] != 0; }, visited, stack);
    sum += x;
    sum_sq += x * x;
    eval.violations += CheckFeasibility(instance, trace, check_user_cap);
    if (trace.branch == Branch::kRounding) ++eval.rounding_runs;
    if (trace.branch == Branch::kSequencing) ++eval.sequencing_runs;
    std::fill(probed.begin(), probed.end(), 0);
    for (const ProbeStep& step : trace.steps) probed[step.user] = 1;
    eval.max_users_probed = std::max(
        eval.max_users_probed,
        static_cast<int>(std::count(probed.begin(), probed.end(), 1)));
  }
  const double n = static_cast<double>(worlds);
  eval.mean = sum / n;
  double var = worlds > 1 ? (sum_sq - n * eval.mean * eval.mean) / (n - 1.0) : 0.0;
  eval.std_error = std::sqrt(std::max(0.0, var) / n);
  return eval;
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_SEQUENCING_H_
