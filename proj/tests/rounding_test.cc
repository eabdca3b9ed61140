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

#include "coupon_probing/rounding.h"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace coupon_probing {
namespace {

// Three users with |C_l| = 2 and K = 2: three sequences per user.
Instance ThreeSequenceInstance(std::optional<int> user_cap = std::nullopt) {
  return Instance(Graph(3, {{0, 1, 0.5}, {1, 2, 0.5}}), {1.0, 2.0, 5.0},
                  {{0.2, 0.5, 0.9}, {0.3, 0.6, 0.7}, {0.1, 0.4, 0.8}}, 2, 5.0,
                  user_cap);
}

DecisionMatrix RandomY(const ActionSpace& space, double user_mass, Rng& rng) {
  DecisionMatrix y{std::vector<double>(space.size(), 0.0)};
  for (NodeId v = 0; v < space.user_count(); ++v) {
    double total = 0.0;
    std::vector<double> w(space.sequence_count());
    for (double& x : w) total += (x = UniformUnit(rng) + 0.05);
    for (int s = 0; s < space.sequence_count(); ++s) {
      y[space.id(v, s)] = user_mass * w[s] / total;
    }
  }
  return y;
}

TEST(IndependentRoundTest, MarginalsMatchY) {
  DecisionMatrix y{{0.0, 0.1, 0.5, 0.9, 1.0}};
  Rng rng(31);
  const int trials = 100000;
  std::vector<int> hits(y.size(), 0);
  for (int t = 0; t < trials; ++t) {
    const RoundedSet raw = IndependentRound(y, rng);
    EXPECT_EQ(raw.stage, RoundingStage::kRaw);
    EXPECT_TRUE(std::is_sorted(raw.actions.begin(), raw.actions.end()));
    for (int a : raw.actions) ++hits[a];
  }
  for (int a = 0; a < y.size(); ++a) {
    const double se = std::sqrt(y[a] * (1 - y[a]) / trials);
    EXPECT_NEAR(hits[a] / double(trials), y[a], 4 * se + 1e-12);
  }
  EXPECT_EQ(IndependentRound(y, 7).actions, IndependentRound(y, 7).actions);
}

TEST(ContentionResolveTest, OutputIsIndependentInBothMatroids) {
  const Instance inst = ThreeSequenceInstance(2);
  const ActionSpace space(inst);
  Rng rng(32);
  for (int t = 0; t < 5000; ++t) {
    const DecisionMatrix y = RandomY(space, 1.0, rng);
    const RoundedSet raw = IndependentRound(y, rng);
    for (MatroidMode mode : {MatroidMode::kPartition, MatroidMode::kPartitionAndUniform}) {
      const RoundedSet out = ContentionResolve(space, raw, y, mode, 2, rng);
      EXPECT_EQ(out.stage, RoundingStage::kResolved);
      std::set<NodeId> users;
      for (int a : out.actions) {
        EXPECT_TRUE(std::binary_search(raw.actions.begin(), raw.actions.end(), a));
        EXPECT_TRUE(users.insert(space.user_of(a)).second);
      }
      if (mode == MatroidMode::kPartitionAndUniform) {
        EXPECT_LE(out.actions.size(), 2u);
      }
      // A user with a rounded action always keeps one in the partition scheme.
      if (mode == MatroidMode::kPartition) {
        std::set<NodeId> raw_users;
        for (int a : raw.actions) raw_users.insert(space.user_of(a));
        EXPECT_EQ(users, raw_users);
      }
    }
  }
}

TEST(ContentionResolveTest, FairSurvivalMatchesClosedForm) {
  const Instance inst = ThreeSequenceInstance();
  const ActionSpace space(inst);
  Rng rng(33);
  const DecisionMatrix y = RandomY(space, 0.9, rng);
  const int trials = 200000;
  std::vector<int> rounded(space.size(), 0), kept(space.size(), 0);
  for (int t = 0; t < trials; ++t) {
    const RoundedSet raw = IndependentRound(y, rng);
    const RoundedSet out =
        ContentionResolve(space, raw, y, MatroidMode::kPartition, std::nullopt, rng);
    for (int a : raw.actions) ++rounded[a];
    for (int a : out.actions) ++kept[a];
  }
  for (NodeId v = 0; v < space.user_count(); ++v) {
    double none = 1.0;
    for (int s = 0; s < space.sequence_count(); ++s) none *= 1 - y[space.id(v, s)];
    const double survival = (1 - none) / UserMass(space, y, v);
    for (int s = 0; s < space.sequence_count(); ++s) {
      const int a = space.id(v, s);
      const double rate = kept[a] / double(rounded[a]);
      const double se = std::sqrt(survival * (1 - survival) / rounded[a]);
      EXPECT_NEAR(rate, survival, 4 * se) << "action " << a;
    }
  }
}

TEST(ContentionResolveTest, RejectsInconsistentInput) {
  const Instance inst = ThreeSequenceInstance(1);
  const ActionSpace space(inst);
  DecisionMatrix y{std::vector<double>(space.size(), 0.1)};
  y[2] = 0.0;
  RoundedSet raw;
  raw.actions = {2};
  EXPECT_THROW(ContentionResolve(space, raw, y, MatroidMode::kPartition, 1, 1), ProbingError);
  raw.actions = {3, 1};
  EXPECT_THROW(ContentionResolve(space, raw, y, MatroidMode::kPartition, 1, 1), ProbingError);
  raw.actions = {1};
  raw.stage = RoundingStage::kResolved;
  EXPECT_THROW(ContentionResolve(space, raw, y, MatroidMode::kPartition, 1, 1), ProbingError);
  raw.stage = RoundingStage::kRaw;
  EXPECT_THROW(ContentionResolve(space, raw, y, MatroidMode::kPartitionAndUniform,
                                 std::nullopt, 1),
               ProbingError);
  DecisionMatrix shorter{{0.1}};
  EXPECT_THROW(ContentionResolve(space, raw, shorter, MatroidMode::kPartition, 1, 1),
               ProbingError);
}

TEST(ExecuteProbeSetTest, StopsProbingBelowHalfBudget) {
  // Every user accepts the first coupon offered, each redemption costs 2
  // and B = 5, so probing stops after two accepts.
  const Instance inst(Graph(4, {}), {2.0}, {{1.0}, {1.0}, {1.0}, {1.0}}, 1, 5.0);
  const ActionSpace space(inst);
  RoundedSet set;
  set.stage = RoundingStage::kResolved;
  set.actions = {0, 1, 2, 3};
  World w;
  w.thresholds = {0.5, 0.5, 0.5, 0.5};
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const PolicyTrace trace = ExecuteProbeSet(inst, space, set, w, seed);
    EXPECT_EQ(trace.steps.size(), 2u);
    EXPECT_EQ(trace.discarded, 2);
    EXPECT_EQ(trace.redeemed, 4.0);
    EXPECT_EQ(trace.branch, Branch::kRounding);
    EXPECT_EQ(CheckFeasibility(inst, trace, false).total(), 0);
  }
}

TEST(ExecuteProbeSetTest, RejectsUnresolvedOrHighValueSets) {
  const Instance inst = ThreeSequenceInstance();
  const ActionSpace space(inst);
  RoundedSet raw;
  raw.actions = {0};
  World w;
  w.thresholds.assign(3, 0.5);
  w.cascade.live.assign(2, 0);
  EXPECT_THROW(ExecuteProbeSet(inst, space, raw, w, 0), ProbingError);
  // Same action ids against a larger budget's space would include c = 5.
  const Instance wide(inst.graph(), inst.coupons(), inst.attractiveness(), 2, 10.0);
  const ActionSpace wide_space(wide);
  RoundedSet high;
  high.stage = RoundingStage::kResolved;
  for (int a = 0; a < wide_space.size(); ++a) {
    if (wide_space.sequence(wide_space.sequence_of(a)).back() == 2) {
      high.actions = {a};
      break;
    }
  }
  ASSERT_FALSE(high.actions.empty());
  const Instance tight(inst.graph(), inst.coupons(), inst.attractiveness(), 2, 9.0);
  EXPECT_THROW(ExecuteProbeSet(tight, wide_space, high, w, 0), ProbingError);
}

TEST(RoundingPolicyTest, VacuousWithoutLowValueCoupons) {
  const Instance inst(Graph(2, {}), {3.0}, {{0.5}, {0.5}}, 1, 4.0);
  const RoundingPolicy policy(inst, {}, false);
  EXPECT_TRUE(policy.vacuous());
  Rng rng(0);
  const World w = SampleWorld(inst, rng);
  const PolicyTrace trace = policy.Run(w, rng);
  EXPECT_TRUE(trace.vacuous);
  EXPECT_TRUE(trace.steps.empty());
}

TEST(RoundingPolicyTest, RunsAreAlwaysFeasible) {
  Rng rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    const bool capped = trial % 2 == 1;
    const Instance inst = testing::RandomInstance(
        {.users = 5, .coupons = 3, .probe_cap = 2,
         .user_cap = capped ? std::optional<int>(2) : std::nullopt},
        rng);
    RelaxationConfig config;
    config.delta = 0.1;
    config.marginal_samples = 200;
    const RoundingPolicy policy(inst, config, capped);
    if (policy.vacuous()) continue;
    for (int run = 0; run < 500; ++run) {
      const World w = SampleWorld(inst, rng);
      const PolicyTrace trace = policy.Run(w, rng);
      EXPECT_EQ(CheckFeasibility(inst, trace, capped).total(), 0);
    }
  }
  EXPECT_THROW(RoundingPolicy(ThreeSequenceInstance(), {}, true), ProbingError);
}

}  // namespace
}  // namespace coupon_probing
