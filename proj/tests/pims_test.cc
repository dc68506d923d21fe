// Copyright 2020 The Authors.
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

#include "epimeas/pims.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "checks.h"
#include "epimeas/errors.h"
#include "epimeas/oracle.h"
#include "test_support.h"

namespace epimeas {
namespace {

MeasurementCosts UnitCosts(int first, int last, int n) {
  MeasurementCosts costs(first, last, n);
  for (int k = first; k <= last; ++k) {
    for (int i = 0; i < n; ++i) {
      costs.Set(k, i, StateKind::kInfected, 1.0);
      costs.Set(k, i, StateKind::kRecovered, 1.0);
    }
  }
  return costs;
}

// Node 1 infected with a self-loop, node 2 healthy and fed by node 1.
PimsInstance TwoNodeInstance(int first = 1, int last = 3) {
  EpidemicNetwork net(2, {{0, 0, 1.0}, {0, 1, 0.5}}, 0.1);
  const std::vector<double> x0{0.1, 0.0};
  return PimsInstance(std::move(net), MakeInitialCondition(x0), UnitCosts(first, last, 2));
}

TEST(PimsTest, ConstructorChecks) {
  EXPECT_THROW(TwoNodeInstance(3, 3), ValidationError);
  EpidemicNetwork net(1, {{0, 0, 1.0}}, 0.1);
  const std::vector<double> x0{0.1};
  MeasurementCosts partial(1, 2, 1);
  partial.Set(1, 0, StateKind::kInfected, 1.0);
  EXPECT_THROW(PimsInstance(net, MakeInitialCondition(x0), partial), ValidationError);
}

TEST(PimsTest, ZeroForcedSamplesNeedNoCost) {
  // Node 2 is at distance 1, so r2[1] is forced zero and may go unpriced.
  EpidemicNetwork net(2, {{0, 0, 1.0}, {0, 1, 0.5}}, 0.1);
  const std::vector<double> x0{0.1, 0.0};
  MeasurementCosts missing(1, 3, 2);
  for (int k = 1; k <= 3; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (StateKind kind : {StateKind::kInfected, StateKind::kRecovered}) {
        if (i == 1 && k == 1 && kind == StateKind::kRecovered) continue;
        missing.Set(k, i, kind, 1.0);
      }
    }
  }
  const PimsInstance instance(net, MakeInitialCondition(x0), missing);
  EXPECT_FALSE(instance.IsCandidate({1, 1, StateKind::kRecovered}));
  EXPECT_TRUE(instance.IsCandidate({1, 1, StateKind::kInfected}));
  EXPECT_THROW(instance.Cost({1, 1, StateKind::kRecovered}), std::out_of_range);
}

TEST(PimsTest, EquationSetsFollowDistances) {
  const PimsInstance instance = TwoNodeInstance();
  const EquationSets sets = BuildEquationSets(instance);
  // Node 1: self-sustaining, x-equations at every k; r-equations from k >= 0.
  // Node 2: neighbor-driven at distance 1; r-equations from k >= 1.
  const std::vector<EquationId> expected_x{{1, 0, StateKind::kInfected},
                                           {1, 1, StateKind::kInfected},
                                           {2, 0, StateKind::kInfected},
                                           {2, 1, StateKind::kInfected}};
  EXPECT_EQ(sets.infected, expected_x);
  const std::vector<EquationId> expected_r{{1, 0, StateKind::kRecovered},
                                           {1, 1, StateKind::kRecovered},
                                           {2, 0, StateKind::kRecovered},
                                           {2, 1, StateKind::kRecovered}};
  EXPECT_EQ(sets.recovered, expected_r);

  // r2[1] is zero so the r-equation of node 2 at k=1 needs only r2[2], x2[1].
  const std::vector<MeasurementId> support =
      EquationSupport(instance, {1, 1, StateKind::kRecovered});
  const std::vector<MeasurementId> expected{{1, 1, StateKind::kInfected},
                                            {1, 2, StateKind::kRecovered}};
  EXPECT_EQ(support, expected);
}

TEST(PimsTest, SelectsCheapestPairAndRecoversTheta) {
  const PimsInstance instance = TwoNodeInstance();
  const PairStrategy strategy = SelectPairStrategy(instance);
  // Node 1 at k=1: x1[2], x1[1], r1[1], r1[2] is the cheapest (4 samples).
  EXPECT_DOUBLE_EQ(strategy.cost, 4.0);
  EXPECT_EQ(strategy.infected_equation, (EquationId{1, 0, StateKind::kInfected}));
  EXPECT_EQ(strategy.recovered_equation, (EquationId{1, 0, StateKind::kRecovered}));
  const Theta truth{3.0, 1.5};
  const IdentificationResult id = IdentifyTheta(
      instance, strategy.measurements, MeasureExactly(instance, strategy.measurements, truth));
  ASSERT_TRUE(id.identified);
  EXPECT_EQ(id.rank, 2);
  EXPECT_NEAR(id.estimate->beta, 3.0, 1e-10);
  EXPECT_NEAR(id.estimate->delta, 1.5, 1e-10);
}

TEST(PimsTest, EmptyStrategyFailsIdentification) {
  const PimsInstance instance = TwoNodeInstance();
  const IdentificationResult id = IdentifyTheta(instance, {}, {});
  EXPECT_FALSE(id.identified);
  EXPECT_FALSE(id.estimate.has_value());
  EXPECT_EQ(id.rank, 0);
}

TEST(PimsTest, RecoveredOnlyStrategyHasRankAtMostOne) {
  const PimsInstance instance = TwoNodeInstance();
  std::vector<MeasurementId> strategy;
  for (const MeasurementId& id : CandidateSet(instance)) {
    if (id.kind == StateKind::kRecovered) strategy.push_back(id);
  }
  const IdentificationResult id = IdentifyTheta(
      instance, strategy, MeasureExactly(instance, strategy, {2.0, 1.0}));
  EXPECT_LE(id.rank, 1);
  EXPECT_FALSE(id.identified);
}

TEST(PimsTest, UnknownSampleIsRejected) {
  const PimsInstance instance = TwoNodeInstance();
  const std::vector<MeasurementId> strategy{{0, 1, StateKind::kInfected}};
  EXPECT_THROW(IdentifyTheta(instance, strategy, {}), ValidationError);
  const std::vector<MeasurementId> zero{{1, 1, StateKind::kRecovered}};
  EXPECT_THROW(IdentifyTheta(instance, zero, {{zero[0], 0.0}}), ValidationError);
}

TEST(PimsTest, NoInfectionIsInfeasible) {
  EpidemicNetwork net(2, {{0, 1, 1.0}}, 0.1);
  const std::vector<double> x0{0.0, 0.0};
  const PimsInstance instance(net, MakeInitialCondition(x0), UnitCosts(1, 3, 2));
  EXPECT_TRUE(CandidateSet(instance).empty());
  EXPECT_THROW(SelectPairStrategy(instance), InfeasibleError);
  EXPECT_EQ(PairCostBound(instance), std::numeric_limits<double>::infinity());
}

TEST(PimsTest, CostsTie) {
  EXPECT_TRUE(CostsTie(1.0, 1.0 + 1e-14));
  EXPECT_FALSE(CostsTie(1.0, 1.0 + 1e-9));
  EXPECT_FALSE(CostsTie(1.0, std::numeric_limits<double>::infinity()));
}

TEST(PimsProperty, RecoveryOnRandomInstances) {
  for (uint64_t trial = 0; trial < 30; ++trial) {
    CounterRng rng(DeriveSeed(31, trial));
    const PimsInstance instance = testing::MakeSmallPimsInstance(rng);
    EXPECT_EQ(testing::CheckPimsRecovery(instance, rng, 20, 1e-8), "") << "trial " << trial;
  }
}

TEST(PimsProperty, RecoveryOnRandomTopologies) {
  int checked = 0;
  for (uint64_t trial = 0; trial < 200; ++trial) {
    CounterRng rng(DeriveSeed(32, trial));
    const int n = rng.UniformInt(1, 6);
    testing::RandomModel model = testing::MakeRandomModel(rng, n, {7.0, 4.0});
    const int first = rng.UniformInt(0, 3);
    const int last = first + rng.UniformInt(1, 4);
    const PimsInstance instance(std::move(model.network), std::move(model.initial),
                                testing::MakeRandomCosts(rng, first, last, n));
    const EquationSets sets = BuildEquationSets(instance);
    if (sets.infected.empty() || sets.recovered.empty()) {
      EXPECT_THROW(SelectPairStrategy(instance), InfeasibleError);
      continue;
    }
    ++checked;
    EXPECT_EQ(testing::CheckPimsRecovery(instance, rng, 5, 1e-7), "") << "trial " << trial;
  }
  EXPECT_GT(checked, 100);
}

TEST(PimsProperty, SelectionMatchesExhaustivePairScan) {
  for (uint64_t trial = 0; trial < 100; ++trial) {
    CounterRng rng(DeriveSeed(33, trial));
    const int n = rng.UniformInt(1, 6);
    testing::RandomModel model = testing::MakeRandomModel(rng, n, {7.0, 4.0});
    const PimsInstance instance(std::move(model.network), std::move(model.initial),
                                testing::MakeRandomCosts(rng, 1, rng.UniformInt(2, 5), n));
    const EquationSets sets = BuildEquationSets(instance);
    if (sets.infected.empty() || sets.recovered.empty()) continue;
    const PairStrategy fast = SelectPairStrategy(instance);
    const PimsOracleReport slow = BruteForcePimsPairs(instance);
    EXPECT_DOUBLE_EQ(fast.cost, slow.value) << "trial " << trial;
    EXPECT_EQ(fast.measurements, slow.optimizer) << "trial " << trial;
    EXPECT_EQ(fast.infected_equation, slow.infected_equation);
    EXPECT_EQ(fast.recovered_equation, slow.recovered_equation);
  }
}

TEST(PimsProperty, FewerThanThreeSamplesNeverIdentify) {
  for (uint64_t trial = 0; trial < 20; ++trial) {
    CounterRng rng(DeriveSeed(34, trial));
    const PimsInstance instance = testing::MakeSmallPimsInstance(rng);
    const std::vector<MeasurementId> candidates = CandidateSet(instance);
    const Theta truth{rng.Uniform(3.0, 7.0), rng.Uniform(1.0, 4.0)};
    for (size_t a = 0; a < candidates.size(); ++a) {
      for (size_t b = a; b < candidates.size(); ++b) {
        std::vector<MeasurementId> strategy{candidates[a]};
        if (b != a) strategy.push_back(candidates[b]);
        const IdentificationResult id =
            IdentifyTheta(instance, strategy, MeasureExactly(instance, strategy, truth));
        ASSERT_FALSE(id.identified) << ToString(candidates[a]) << " " << ToString(candidates[b]);
      }
    }
  }
}

}  // namespace
}  // namespace epimeas
