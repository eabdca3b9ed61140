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

// Rounding of the fractional solution into a probe set and its execution:
// independent rounding, contention resolution against the per-user partition
// matroid (and the W-uniform matroid), and the budget-gated executor.

#ifndef COUPON_PROBING_ROUNDING_H_
#define COUPON_PROBING_ROUNDING_H_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "coupon_probing/model.h"
#include "coupon_probing/random.h"
#include "coupon_probing/relaxation.h"

namespace coupon_probing {

enum class RoundingStage { kRaw, kResolved };

struct RoundedSet {
  std::vector<int> actions;  // action ids, increasing
  RoundingStage stage = RoundingStage::kRaw;
};

enum class MatroidMode { kPartition, kPartitionAndUniform };

inline RoundedSet IndependentRound(const DecisionMatrix& y, Rng& rng) {
  RoundedSet raw;
  for (int a = 0; a < y.size(); ++a) {
    if (Bernoulli(rng, y[a])) raw.actions.push_back(a);
  }
  return raw;
}

inline RoundedSet IndependentRound(const DecisionMatrix& y, uint64_t rng_seed) {
  Rng rng = StreamRng(rng_seed, {});
  return IndependentRound(y, rng);
}

namespace internal {

// Fair contention resolution within one class N with marginals y: given the
// rounded members A (|A| >= 2), member i is kept with probability
//   ( sum_{j in A-i} y_j / (|A|-1) + sum_{j in N-A} y_j / |A| ) / y(N),
// which gives every member the same conditional survival
//   (1 - prod_{j in N} (1 - y_j)) / y(N) >= (1 - e^{-y(N)}) / y(N).
inline int FairPick(const std::vector<int>& present, double class_mass,
                    const DecisionMatrix& y, Rng& rng) {
  const double k = static_cast<double>(present.size());
  double present_mass = 0.0;
  for (int a : present) present_mass += y[a];
  const double absent_mass = std::max(0.0, class_mass - present_mass);
  double u = UniformUnit(rng) * class_mass;
  for (int a : present) {
    const double weight =
        (present_mass - y[a]) / (k - 1.0) + absent_mass / k;
    if (u < weight) return a;
    u -= weight;
  }
  return present.back();
}

}  // namespace internal

// Prunes `raw` to an independent set. In kPartitionAndUniform mode the
// per-user and cardinality schemes run with independent randomness and the
// result is their intersection.
inline RoundedSet ContentionResolve(const ActionSpace& space,
                                    const RoundedSet& raw,
                                    const DecisionMatrix& y, MatroidMode mode,
                                    std::optional<int> user_cap, Rng& rng) {
  if (raw.stage != RoundingStage::kRaw) {
    throw ProbingError("contention resolution expects a raw rounded set");
  }
  if (y.size() != space.size()) throw ProbingError("y does not match the action space");
  for (std::size_t i = 0; i < raw.actions.size(); ++i) {
    const int a = raw.actions[i];
    if (a < 0 || a >= space.size() || !(y[a] > 0.0)) {
      throw ProbingError("raw set contains an action that y cannot produce");
    }
    if (i > 0 && a <= raw.actions[i - 1]) {
      throw ProbingError("raw set must list increasing action ids");
    }
  }
  if (mode == MatroidMode::kPartitionAndUniform && !user_cap) {
    throw ProbingError("two-matroid resolution needs a user cap");
  }

  std::vector<uint8_t> keep(space.size(), 0);
  std::vector<int> present;
  std::size_t i = 0;
  while (i < raw.actions.size()) {
    const NodeId v = space.user_of(raw.actions[i]);
    present.clear();
    while (i < raw.actions.size() && space.user_of(raw.actions[i]) == v) {
      present.push_back(raw.actions[i++]);
    }
    if (present.size() == 1) {
      keep[present[0]] = 1;
      continue;
    }
    keep[internal::FairPick(present, UserMass(space, y, v), y, rng)] = 1;
  }

  RoundedSet resolved;
  resolved.stage = RoundingStage::kResolved;
  if (mode == MatroidMode::kPartition) {
    for (int a : raw.actions) {
      if (keep[a]) resolved.actions.push_back(a);
    }
    return resolved;
  }
  // Cardinality scheme: keep everything if |R| <= W, otherwise a uniformly
  // random W-subset of R.
  std::vector<int> pool = raw.actions;
  const auto cap = static_cast<std::size_t>(std::max(0, *user_cap));
  if (pool.size() > cap) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(cap);
    std::sort(pool.begin(), pool.end());
  }
  for (int a : pool) {
    if (keep[a]) resolved.actions.push_back(a);
  }
  return resolved;
}

inline RoundedSet ContentionResolve(const ActionSpace& space,
                                    const RoundedSet& raw,
                                    const DecisionMatrix& y, MatroidMode mode,
                                    std::optional<int> user_cap,
                                    uint64_t rng_seed) {
  Rng rng = StreamRng(rng_seed, {});
  return ContentionResolve(space, raw, y, mode, user_cap, rng);
}

// Visits the resolved actions in a random order. An action is probed only
// while the remaining budget is at least B/2; since every coupon is at most
// B/2, no redemption can overspend.
inline PolicyTrace ExecuteProbeSet(const Instance& instance,
                                   const ActionSpace& space,
                                   const RoundedSet& resolved,
                                   const World& world, Rng& rng) {
  if (resolved.stage != RoundingStage::kResolved) {
    throw ProbingError("execution expects a resolved rounded set");
  }
  const double half = instance.budget() / 2;
  for (int a : resolved.actions) {
    for (int c : space.sequence(space.sequence_of(a))) {
      if (instance.coupon(c) > half) {
        throw ProbingError("probe set uses a coupon above B/2");
      }
    }
  }
  std::vector<int> order = resolved.actions;
  std::shuffle(order.begin(), order.end(), rng);
  PolicyTrace trace;
  trace.branch = Branch::kRounding;
  double budget = instance.budget();
  const double slack = kBudgetSlack * instance.budget();
  for (int a : order) {
    if (budget + slack < half) {
      ++trace.discarded;
      continue;
    }
    const Action action = space.action(a);
    if (auto c = ProbeUser(instance, world, action, budget, &trace)) {
      budget -= instance.coupon(*c);
    }
  }
  return trace;
}

inline PolicyTrace ExecuteProbeSet(const Instance& instance,
                                   const ActionSpace& space,
                                   const RoundedSet& resolved,
                                   const World& world, uint64_t order_seed) {
  Rng rng = StreamRng(order_seed, {});
  return ExecuteProbeSet(instance, space, resolved, world, rng);
}

// The rounding branch (alg1, or e-alg1 with the user cap). The fractional
// solution is computed once at construction; each Run() rounds it afresh.
class RoundingPolicy {
 public:
  RoundingPolicy(const Instance& instance, const RelaxationConfig& config,
                 bool use_user_cap)
      : instance_(&instance), space_(instance), use_user_cap_(use_user_cap) {
    if (use_user_cap_ && !instance.user_cap()) {
      throw ProbingError("extended rounding needs an instance with W");
    }
    if (!space_.empty()) {
      y_ = ContinuousGreedy(instance, space_, config, use_user_cap_);
    }
  }

  // True when there is no low-value coupon (or K = 0), so the branch can
  // never probe anyone.
  bool vacuous() const { return space_.empty(); }
  const ActionSpace& space() const { return space_; }
  const DecisionMatrix& fractional() const { return y_; }

  PolicyTrace Run(const World& world, Rng& rng) const {
    if (vacuous()) {
      PolicyTrace trace;
      trace.branch = Branch::kRounding;
      trace.vacuous = true;
      return trace;
    }
    const RoundedSet raw = IndependentRound(y_, rng);
    const RoundedSet resolved = ContentionResolve(
        space_, raw, y_,
        use_user_cap_ ? MatroidMode::kPartitionAndUniform : MatroidMode::kPartition,
        instance_->user_cap(), rng);
    return ExecuteProbeSet(*instance_, space_, resolved, world, rng);
  }

 private:
  const Instance* instance_;
  ActionSpace space_;
  bool use_user_cap_;
  DecisionMatrix y_;
};

// One end-to-end rounding run against a freshly sampled world.
inline PolicyTrace RunRoundingPolicy(const Instance& instance,
                                     const RelaxationConfig& config,
                                     bool use_user_cap, uint64_t rng_seed) {
  const RoundingPolicy policy(instance, config, use_user_cap);
  Rng world_rng = StreamRng(rng_seed, {0});
  Rng policy_rng = StreamRng(rng_seed, {1});
  const World world = SampleWorld(instance, world_rng);
  return policy.Run(world, policy_rng);
}

}  // namespace coupon_probing

#endif  // COUPON_PROBING_ROUNDING_H_
