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

#include "coupon_probing/relaxation.h"

#include <cmath>
#include <vector>

#include "coupon_probing/oracle.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace coupon_probing {
namespace {

// Small instances whose action space stays within the exact set-value limit.
Instance SmallInstance(Rng& rng, std::optional<int> user_cap = std::nullopt) {
  for (;;) {
    const Instance inst = testing::RandomInstance(
        {.users = 3, .coupons = 3, .probe_cap = 1 + static_cast<int>(rng() % 2),
         .density = 0.5, .user_cap = user_cap},
        rng);
    const ActionSpace space(inst);
    if (!space.empty() && space.size() <= 9) return inst;
  }
}

void ExpectFeasible(const Instance& inst, const ActionSpace& space,
                    const DecisionMatrix& y, const std::vector<double>& costs,
                    double beta, bool use_user_cap) {
  for (double v : y.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (NodeId v = 0; v < inst.user_count(); ++v) EXPECT_LE(UserMass(space, y, v), 1.0);
  EXPECT_LE(Dot(costs, y), beta * inst.budget());
  if (use_user_cap) {
    EXPECT_LE(TotalMass(y), beta * *inst.user_cap());
  }
}

TEST(BetaTest, BasicDefaultMaximizesFactor) {
  const double beta = DefaultBeta();
  EXPECT_NEAR(beta, 0.21132486540518713, 1e-15);
  for (double b = 0.0; b <= 0.5; b += 1e-4) {
    EXPECT_LE(BasicRatioFactor(b), BasicRatioFactor(beta) + 1e-15);
  }
  EXPECT_NEAR(ApproximationRatio(beta, false), 0.0304, 5e-5);
}

TEST(BetaTest, ExtendedDefaultMatchesClosedForm) {
  const double closed = (7.0 - std::sqrt(17.0)) / 16.0;
  EXPECT_NEAR(ExtendedDefaultBeta(), closed, 1e-9);
  EXPECT_NEAR(ApproximationRatio(ExtendedDefaultBeta(), true), 0.02448, 5e-5);
  EXPECT_LT(ApproximationRatio(ExtendedDefaultBeta(), true),
            ApproximationRatio(DefaultBeta(), false));
}

TEST(DefaultDeltaTest, InverseSquareOfActionCount) {
  const ActionSpace space(testing::ToyInstance());
  EXPECT_DOUBLE_EQ(DefaultDelta(space), 1.0 / 25.0);
}

TEST(ActionSetUtilityTest, UsesLargestCouponPerUser) {
  const Instance inst(Graph(2, {{0, 1, 1.0}}), {1.0, 2.0, 3.0},
                      {{0.2, 0.5, 0.9}, {0.1, 0.2, 0.3}}, 2, 10.0);
  const ActionSpace space(inst);
  World w;
  w.thresholds = {0.4, 0.99};
  w.cascade.live = {1};
  // {0} alone is rejected at 0.4; {0, 1} reaches p = 0.5 and then node 1.
  const int only_first = space.id(0, 0);
  int pair = -1;
  for (int s = 0; s < space.sequence_count(); ++s) {
    if (space.sequence(s) == ProbeSequence{0, 1}) pair = space.id(0, s);
  }
  ASSERT_GE(pair, 0);
  const std::vector<int> first = {only_first};
  const std::vector<int> both = {only_first, pair};
  EXPECT_EQ(ActionSetUtility(inst, space, first, w), 0.0);
  EXPECT_EQ(ActionSetUtility(inst, space, both, w), 2.0);
}

TEST(EstimateMarginalsTest, MatchesExactMultilinearDifferences) {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance inst = SmallInstance(rng);
    const ActionSpace space(inst);
    const std::vector<double> values = ExactActionSetValues(inst, space);
    DecisionMatrix y{std::vector<double>(space.size())};
    for (double& v : y.values) v = 0.3 * UniformUnit(rng);
    RelaxationConfig config;
    config.marginal_samples = 40000;
    config.rng_seed = 100 + trial;
    const std::vector<double> omega = EstimateMarginals(inst, space, y, config);
    for (int a = 0; a < space.size(); ++a) {
      DecisionMatrix with = y;
      with[a] = 1.0;
      const double exact = MultilinearExact(values, with) - MultilinearExact(values, y);
      // Estimator targets E[f(R + a) - f(R)], i.e. (1 - y_a) dF/dy_a.
      EXPECT_NEAR(omega[a], exact, 0.05 * inst.user_count()) << "action " << a;
      EXPECT_GE(omega[a], 0.0);
    }
  }
}

TEST(EstimateMarginalsTest, ReproducibleAndSeedSensitive) {
  Rng rng(22);
  const Instance inst = SmallInstance(rng);
  const ActionSpace space(inst);
  DecisionMatrix y{std::vector<double>(space.size(), 0.2)};
  RelaxationConfig config;
  config.marginal_samples = 500;
  config.rng_seed = 9;
  EXPECT_EQ(EstimateMarginals(inst, space, y, config, 3),
            EstimateMarginals(inst, space, y, config, 3));
  config.marginal_samples = 0;
  EXPECT_THROW(EstimateMarginals(inst, space, y, config), ProbingError);
}

TEST(SolveRelaxationLpTest, MatchesVertexEnumeration) {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const bool capped = trial % 2 == 1;
    const Instance inst = SmallInstance(rng, capped ? std::optional<int>(1 + trial % 3)
                                                    : std::nullopt);
    const ActionSpace space(inst);
    if (space.size() > 6) continue;
    std::vector<double> weights(space.size());
    for (double& w : weights) w = UniformUnit(rng) * 3 - 0.5;
    const std::vector<double> costs = ActionCosts(inst, space, CostMode::kThresholdConsistent);
    const double beta = 0.5 * UniformUnit(rng);
    const DecisionMatrix y = SolveRelaxationLp(inst, space, weights, costs, beta, capped);
    ExpectFeasible(inst, space, y, costs, beta, capped);

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (NodeId v = 0; v < inst.user_count(); ++v) {
      std::vector<double> r(space.size(), 0.0);
      for (int a = 0; a < space.size(); ++a) r[a] = space.user_of(a) == v;
      rows.push_back(r);
      rhs.push_back(1.0);
    }
    rows.push_back(costs);
    rhs.push_back(beta * inst.budget());
    if (capped) {
      rows.emplace_back(space.size(), 1.0);
      rhs.push_back(beta * *inst.user_cap());
    }
    double got = 0.0;
    for (int a = 0; a < space.size(); ++a) got += weights[a] * y[a];
    EXPECT_NEAR(got, testing::VertexEnumerationOptimum(weights, rows, rhs), 1e-9);
  }
}

TEST(SolveRelaxationLpTest, RejectsBadArguments) {
  const Instance toy = testing::ToyInstance();
  const ActionSpace space(toy);
  const std::vector<double> costs = ActionCosts(toy, space, CostMode::kThresholdConsistent);
  std::vector<double> w(space.size(), 1.0);
  EXPECT_THROW(SolveRelaxationLp(toy, space, w, costs, 0.6, false), ProbingError);
  EXPECT_THROW(SolveRelaxationLp(toy, space, w, costs, 0.2, true), ProbingError);
  w[0] = NAN;
  EXPECT_THROW(SolveRelaxationLp(toy, space, w, costs, 0.2, false), ProbingError);
}

TEST(ContinuousGreedyTest, ExactlyFeasibleAndBeatsMultilinear) {
  Rng rng(24);
  for (int trial = 0; trial < 12; ++trial) {
    const bool capped = trial % 3 == 0;
    const Instance inst = SmallInstance(rng, capped ? std::optional<int>(1) : std::nullopt);
    const ActionSpace space(inst);
    RelaxationConfig config;
    config.delta = 0.05;
    config.marginal_samples = 300;
    config.rng_seed = trial;
    int calls = 0;
    const DecisionMatrix y = ContinuousGreedy(
        inst, space, config, capped, [&](int, const DecisionMatrix&) { ++calls; });
    EXPECT_EQ(calls, 20);
    const std::vector<double> costs = ActionCosts(inst, space, config.cost_mode);
    ExpectFeasible(inst, space, y, costs, config.beta, capped);
    const std::vector<double> values = ExactActionSetValues(inst, space);
    EXPECT_GE(ConcaveExtensionExact(values, y), MultilinearExact(values, y) - 1e-9);
  }
}

TEST(ContinuousGreedyTest, ReachesConstantFractionOfRelaxationOptimum) {
  Rng rng(25);
  for (int trial = 0; trial < 6; ++trial) {
    const Instance inst = SmallInstance(rng);
    const ActionSpace space(inst);
    RelaxationConfig config;
    config.delta = 0.02;
    config.marginal_samples = 2000;
    config.rng_seed = trial;
    const DecisionMatrix y = ContinuousGreedy(inst, space, config, false);
    const std::vector<double> values = ExactActionSetValues(inst, space);
    const std::vector<double> costs = ActionCosts(inst, space, config.cost_mode);
    // Optimum of the beta-scaled polytope is at least beta times the full one.
    const double opt = RelaxationOptimum(inst, space, values, costs, false);
    EXPECT_GE(MultilinearExact(values, y),
              (1 - std::exp(-1.0)) * config.beta * opt - 0.05);
  }
}

TEST(ContinuousGreedyTest, RejectsBadDelta) {
  const Instance toy = testing::ToyInstance();
  const ActionSpace space(toy);
  RelaxationConfig config;
  config.delta = 0.0;
  EXPECT_THROW(ContinuousGreedy(toy, space, config, false), ProbingError);
  config.delta = 1.5;
  EXPECT_THROW(ContinuousGreedy(toy, space, config, false), ProbingError);
}

}  // namespace
}  // namespace coupon_probing
