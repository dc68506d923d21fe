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

#include "epimeas/experiment.h"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "epimeas/csv.h"
#include "epimeas/errors.h"
#include "epimeas/io.h"
#include "epimeas/parallel.h"
#include "epimeas/rng.h"

namespace epimeas {
namespace {

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> Cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

TEST(RngTest, MatchesReferenceValues) {
  // Reference values from an independent 64-bit implementation.
  EXPECT_EQ(DeriveSeed(1, 0), 0xc87831003a95207cULL);
  EXPECT_EQ(DeriveSeed(7, 3), 0x53ca5535a13d70baULL);
  CounterRng rng(12345);
  EXPECT_EQ(rng.NextU64(), 0x22118258a9d111a0ULL);
  EXPECT_EQ(rng.NextU64(), 0x346edce5f713f8edULL);
  EXPECT_EQ(rng.NextU64(), 0x1e9a57bc80e6721dULL);
  EXPECT_EQ(CounterRng(12345).NextUnit(), 0.1330796686614273);
  CounterRng ints(9);
  for (int i = 0; i < 1000; ++i) {
    const int v = ints.UniformInt(1, 3);
    ASSERT_GE(v, 1);
    ASSERT_LE(v, 3);
  }
}

TEST(ParallelMapTest, OrderedResultsAndErrors) {
  const auto squares = ParallelMap(100, 7, [](size_t i) { return i * i; });
  for (size_t i = 0; i < squares.size(); ++i) EXPECT_EQ(squares[i], i * i);
  EXPECT_THROW(ParallelMap(50, 4,
                           [](size_t i) -> int {
                             if (i == 17) throw std::runtime_error("boom");
                             return 0;
                           }),
               std::runtime_error);
  EXPECT_TRUE(ParallelMap(0, 3, [](size_t) { return 1; }).empty());
}

TEST(CsvTest, FormatDoubleRoundTrips) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_EQ(FormatDouble(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(FormatDouble(std::nan("")), "nan");
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.Uniform(-1, 1), rng.UniformInt(-60, 60));
    EXPECT_EQ(std::strtod(FormatDouble(v).c_str(), nullptr), v);
  }
}

TEST(GenerateTest, SmallTemplateConstants) {
  const PemsInstance a = GenerateInstance(4, InstanceTemplate::kSmall);
  EXPECT_NO_THROW(ValidatePemsInstance(a));
  EXPECT_EQ(a.network.num_nodes(), 5);
  EXPECT_DOUBLE_EQ(a.network.step(), 0.1);
  EXPECT_DOUBLE_EQ(a.initial.susceptible[0], 0.95);
  EXPECT_DOUBLE_EQ(a.initial.infected[0], 0.05);
  for (int i = 1; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(a.initial.susceptible[i], 0.99);
    EXPECT_DOUBLE_EQ(a.initial.infected[i], 0.01);
  }
  EXPECT_EQ(a.first_time(), 5);
  EXPECT_EQ(a.last_time(), 5);
  EXPECT_EQ(a.infected_copies, std::vector<int>(5, 2));
  EXPECT_EQ(a.recovered_copies, std::vector<int>(5, 2));
  EXPECT_EQ(a.infected_batch, std::vector<double>(5, 100.0));
  EXPECT_EQ(a.test_capacity, std::vector<double>(5, 1000.0));
  EXPECT_EQ(a.beta_prior.shape_a, 6.0);
  EXPECT_EQ(a.beta_prior.shape_b, 3.0);
  EXPECT_EQ(a.beta_prior.lo, 3.0);
  EXPECT_EQ(a.beta_prior.hi, 7.0);
  EXPECT_EQ(a.delta_prior.shape_a, 3.0);
  EXPECT_EQ(a.delta_prior.shape_b, 4.0);
  EXPECT_EQ(a.delta_prior.lo, 1.0);
  EXPECT_EQ(a.delta_prior.hi, 4.0);
  for (int i = 0; i < 5; ++i) {
    const double load = 0.1 * 7.0 * a.network.closed_in_weight(i);
    EXPECT_LE(load, 0.95 + 1e-12);
    const double c = *a.costs.Get(5, i, StateKind::kInfected);
    EXPECT_EQ(c, *a.costs.Get(5, i, StateKind::kRecovered));
    EXPECT_TRUE(c == 1.0 || c == 2.0 || c == 3.0);
  }
  EXPECT_EQ(a.network.edges().size(), DefaultTopology().size());
}

TEST(GenerateTest, LargeTemplateAndSeeds) {
  const PemsInstance b = GenerateInstance(4, InstanceTemplate::kLarge);
  EXPECT_EQ(b.infected_copies, std::vector<int>(5, 10));
  EXPECT_EQ(b.recovered_copies, std::vector<int>(5, 10));
  EXPECT_EQ(b.first_time(), 1);
  EXPECT_EQ(b.last_time(), 5);
  EXPECT_EQ(b.beta_prior.shape_a, 8.0);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_NO_THROW(ValidatePemsInstance(GenerateInstance(seed, InstanceTemplate::kSmall)));
    EXPECT_NO_THROW(ValidatePemsInstance(GenerateInstance(seed, InstanceTemplate::kLarge)));
  }
  const std::string one = GeneratedInstanceJson(GenerateInstance(9, InstanceTemplate::kSmall), 9,
                                                InstanceTemplate::kSmall)
                              .dump();
  const std::string two = GeneratedInstanceJson(GenerateInstance(9, InstanceTemplate::kSmall), 9,
                                                InstanceTemplate::kSmall)
                              .dump();
  EXPECT_EQ(one, two);
  EXPECT_NE(one.find("splitmix64-counter"), std::string::npos);
  EXPECT_NE(GenerateInstance(10, InstanceTemplate::kSmall).network.edges()[0].weight,
            GenerateInstance(9, InstanceTemplate::kSmall).network.edges()[0].weight);
  EXPECT_THROW(ParseTemplate("medium"), ValidationError);
}

TEST(GenerateTest, CustomTopology) {
  const std::vector<Edge> ring{{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {0, 0, 1.0}};
  const PemsInstance c = GenerateInstance(2, InstanceTemplate::kSmall, ring);
  EXPECT_EQ(c.network.num_nodes(), 3);
  EXPECT_EQ(c.network.edges().size(), 4u);
  EXPECT_NO_THROW(ValidatePemsInstance(c));
}

TEST(IoTest, InstanceJsonRoundTrip) {
  const PemsInstance a = GenerateInstance(5, InstanceTemplate::kLarge);
  const PemsInstance b = ParsePemsInstance(PemsInstanceToJson(a));
  EXPECT_EQ(PemsInstanceToJson(a).dump(), PemsInstanceToJson(b).dump());
  nlohmann::json broken = PemsInstanceToJson(a);
  broken.erase("zeta");
  EXPECT_THROW(ParsePemsInstance(broken), ValidationError);
  broken = PemsInstanceToJson(a);
  broken["x0"] = {0.1, 0.2};
  EXPECT_THROW(ParsePemsInstance(broken), ValidationError);
  broken = PemsInstanceToJson(a);
  broken["h"] = "fast";
  EXPECT_THROW(ParsePemsInstance(broken), ValidationError);
  EXPECT_THROW(ReadJsonFile("/nonexistent/instance.json"), ValidationError);
}

TEST(BudgetSweepTest, ParseAndValues) {
  const BudgetSweep s = ParseBudgetSweep("0:10:2.5");
  EXPECT_EQ(BudgetValues(s), (std::vector<double>{0, 2.5, 5, 7.5, 10}));
  EXPECT_EQ(BudgetValues(ParseBudgetSweep("0:1:0.1")).size(), 11u);
  EXPECT_THROW(ParseBudgetSweep("1:2"), ValidationError);
  EXPECT_THROW(ParseBudgetSweep("1:2:0"), ValidationError);
  EXPECT_THROW(ParseBudgetSweep("a:2:1"), ValidationError);
  EXPECT_THROW(ParseBudgetSweep("3:2:1"), ValidationError);
}

TEST(BudgetSweepTest, DefaultBudgetsSpanCheapestToAll) {
  const PemsInstance a = GenerateInstance(4, InstanceTemplate::kSmall);
  const PemsProblem p = BuildPemsProblem(a, 5);
  const std::vector<double> budgets = DefaultBudgets(p);
  ASSERT_EQ(budgets.size(), 10u);
  EXPECT_EQ(budgets.front(), MinUnitCost(p));
  EXPECT_NEAR(budgets.back(), SelectionCost(p, p.copies), 1e-12);
}

TEST(EvaluateBudgetTest, ZeroBudgetRowIsZero) {
  const PemsProblem p = BuildPemsProblem(GenerateInstance(4, InstanceTemplate::kSmall), 9);
  for (Objective objective : {Objective::kLogDet, Objective::kTrace}) {
    const BudgetRow row = EvaluateBudget(p, 0.0, objective, {});
    EXPECT_EQ(row.greedy_value, 0.0);
    ASSERT_TRUE(row.opt_value.has_value());
    EXPECT_EQ(*row.opt_value, 0.0);
  }
}

TEST(EvaluateBudgetTest, LargeTemplateLeavesOracleEmpty) {
  const PemsProblem p = BuildPemsProblem(GenerateInstance(4, InstanceTemplate::kLarge), 9);
  const BudgetRow row = EvaluateBudget(p, 20.0, Objective::kTrace, {});
  EXPECT_FALSE(row.opt_value.has_value());
  ASSERT_TRUE(row.gamma1_lb.has_value());
  EXPECT_GE(*row.gamma1_lb, 0.0);
  EXPECT_LE(*row.gamma1_lb, 1.0);
  EXPECT_TRUE(row.gamma2_hat.has_value());
  EXPECT_TRUE(row.guarantee_fraction.has_value());
  const BudgetRow d = EvaluateBudget(p, 20.0, Objective::kLogDet, {});
  EXPECT_FALSE(d.gamma1_lb.has_value());
  EXPECT_NEAR(*d.guarantee_fraction, 0.5 * (1 - std::exp(-1.0)), 1e-15);
  const std::vector<std::string> lines = Lines(BudgetRowsCsv({row, d}));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "# schema-version: 1");
  EXPECT_EQ(lines[1], "B,greedy_value,opt_value,gamma1_lb,gamma2_hat,guarantee_fraction");
  EXPECT_EQ(Cells(lines[2])[2], "");
  EXPECT_EQ(Cells(lines[3]).size(), 6u);
}

TEST(SweepTest, DeterministicAcrossRunsAndWorkers) {
  ExperimentSpec spec;
  spec.replications = 3;
  spec.seed = 17;
  spec.grid_points = 9;
  spec.objective = Objective::kTrace;
  spec.workers = 1;
  const std::string one = RunSweep(spec);
  spec.workers = 3;
  EXPECT_EQ(RunSweep(spec), one);
  EXPECT_EQ(RunSweep(spec), one);
  spec.seed = 18;
  EXPECT_NE(RunSweep(spec), one);
}

TEST(SweepTest, LayoutAndGuaranteeInequality) {
  ExperimentSpec spec;
  spec.replications = 2;
  spec.grid_points = 9;
  spec.objective = Objective::kLogDet;
  spec.budgets = ParseBudgetSweep("0:12:4");
  const std::vector<std::string> lines = Lines(RunSweep(spec));
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[0], "# schema-version: 1");
  EXPECT_EQ(lines[1].rfind("# generator: splitmix64-counter", 0), 0u);
  EXPECT_EQ(lines[2],
            "replication,B,greedy_value,opt_value,gamma1_lb,gamma2_hat,guarantee_fraction");
  // 2 replications x 4 budgets, then 4 mean rows.
  ASSERT_EQ(lines.size(), 3u + 8u + 4u);
  for (size_t l = 3; l < lines.size(); ++l) {
    const std::vector<std::string> c = Cells(lines[l]);
    ASSERT_EQ(c.size(), 7u) << lines[l];
    if (c[1] == "0") {
      EXPECT_EQ(c[2], "0");
      EXPECT_EQ(c[3], "0");
    }
    if (!c[3].empty()) {
      EXPECT_GE(std::stod(c[2]), std::stod(c[6]) * std::stod(c[3]) - 1e-12) << lines[l];
    }
  }
  EXPECT_EQ(Cells(lines.back())[0], "mean");
}

TEST(SweepTest, PimsMode) {
  ExperimentSpec spec;
  spec.mode = SweepMode::kPims;
  spec.replications = 4;
  const std::vector<std::string> lines = Lines(RunSweep(spec));
  ASSERT_EQ(lines.size(), 3u + 4u);
  EXPECT_EQ(lines[2], "replication,cost,pair_bound,bound_ratio,oracle_cost,identified");
  for (size_t l = 3; l < lines.size(); ++l) {
    const std::vector<std::string> c = Cells(lines[l]);
    EXPECT_EQ(c.back(), "1");
    EXPECT_LE(std::stod(c[1]), std::stod(c[2]));
    EXPECT_EQ(c[1], c[4]);
  }
}

}  // namespace
}  // namespace epimeas
