#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "mrm/oracle.hpp"
#include "mrm/planning.hpp"

namespace mrm {
namespace {

using testing::random_targets;
using testing::uniform_int;

const RewardDistribution kExp = RewardDistribution::exponential(1.0);

MarkedPointField field_of(std::vector<Target> targets, double depth = 100.0) {
  return MarkedPointField::from_targets(std::move(targets), 1.0, StripRegion{depth, 100.0}, kExp);
}

// Checks the cone invariants of a returned plan.
void expect_feasible(const ContinuousPlan& plan, const RobotState& start, double alpha) {
  RobotState here = start;
  double sum = 0.0;
  for (const Target& t : plan.visited) {
    ASSERT_GT(t.p1, here.x1);
    ASSERT_TRUE(reachable(here, t, alpha));
    here = {t.p1, t.p2};
    sum += t.reward;
  }
  ASSERT_NEAR(sum, plan.total_reward, 1e-12 * sum);
}

TEST(Reachable, Examples) {
  EXPECT_TRUE(reachable({0, 0}, {2, 1, 0}, 1.0));
  EXPECT_FALSE(reachable({0, 0}, {1, 2, 0}, 1.0));
  EXPECT_TRUE(reachable({0, 0}, {1, 2, 0}, 2.0));
  EXPECT_FALSE(reachable({1, 0}, {0.5, 0, 0}, 10.0));
}

TEST(OptimalPlan, EmptyFieldHasZeroReward) {
  const auto plan = optimal_plan(field_of({}), {0, 0}, 10.0, 1.0);
  EXPECT_EQ(plan.total_reward, 0.0);
  EXPECT_TRUE(plan.visited.empty());
  EXPECT_EQ(plan.end_state, (RobotState{10.0, 0.0}));
}

TEST(OptimalPlan, ThreeTargetExample) {
  const auto field = field_of({{1, 0, 5}, {2, 0.5, 3}, {2.5, -2, 10}});
  for (ChainSolver solver : {ChainSolver::PairScan, ChainSolver::DominanceSweep}) {
    const auto plan = optimal_plan(field, {0, 0}, 3.0, 1.0, solver);
    EXPECT_EQ(plan.total_reward, 10.0);
    ASSERT_EQ(plan.visited.size(), 1u);
    EXPECT_EQ(plan.visited[0], (Target{2.5, -2, 10}));
    EXPECT_EQ(plan.end_state, (RobotState{3.0, -2.0}));
  }
  EXPECT_EQ(oracle::enumerate_chains(field.targets(), {0, 0}, 3.0, 1.0).total, 10.0);
}

TEST(OptimalPlan, ZeroRewardTargetsAreNeverVisited) {
  const auto plan = optimal_plan(field_of({{1, 0, 0}, {2, 0, 0}}), {0, 0}, 3.0, 1.0);
  EXPECT_TRUE(plan.visited.empty());
}

TEST(OptimalPlan, EqualsSubsetEnumerationOnRandomFields) {
  for (int c = 0; c < 1000; ++c) {
    SeededRng rng(99, c);
    const bool integer = c % 2 == 0;
    const double alpha = 0.25 + 2.0 * rng.uniform();
    auto targets = random_targets(rng, 12, 10.0, 6.0, integer);
    const auto field = field_of(targets);
    const RobotState start{0.0, 0.0};
    const double horizon = 10.0;
    const auto brute = oracle::enumerate_chains(targets, start, horizon, alpha);
    for (ChainSolver solver : {ChainSolver::PairScan, ChainSolver::DominanceSweep}) {
      const auto plan = optimal_plan(field, start, horizon, alpha, solver);
      ASSERT_EQ(plan.total_reward, brute.total) << "case " << c;
      expect_feasible(plan, start, alpha);
      if (!integer) ASSERT_EQ(plan.visited, brute.chain) << "case " << c;
    }
  }
}

TEST(OptimalPlan, PairScanRelaxationsCountOrderedPairs) {
  for (int c = 0; c < 100; ++c) {
    SeededRng rng(7, c);
    const auto targets = random_targets(rng, 30, 5.0, 1.0, false);
    const auto plan = optimal_plan(field_of(targets), {0, 0}, 5.0, 1.0, ChainSolver::PairScan);
    std::size_t n = 0;
    for (const auto& t : targets) n += reachable({0, 0}, t, 1.0);
    ASSERT_EQ(plan.dp_relaxations, n * (n - (n > 0)) / 2);
  }
}

TEST(OptimalPlan, SolversAgreeOnLargeFields) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto field =
        MarkedPointField::generate(3.0, reachable_cone(40.0, 1.0), kExp, 17, s);
    const auto a = optimal_plan(field, {0, 0}, 40.0, 1.0, ChainSolver::PairScan);
    const auto b = optimal_plan(field, {0, 0}, 40.0, 1.0, ChainSolver::DominanceSweep);
    ASSERT_EQ(a.total_reward, b.total_reward);
    ASSERT_EQ(a.visited, b.visited);
    expect_feasible(a, {0, 0}, 1.0);
  }
}

TEST(RecedingHorizon, WholeHorizonSensingEqualsOptimal) {
  for (int c = 0; c < 200; ++c) {
    SeededRng rng(5, c);
    const auto targets = random_targets(rng, 12, 10.0, 6.0, false);
    const auto field = field_of(targets);
    const double L = 10.0;
    const auto r = receding_horizon_plan(field, {0, 0}, L, L + rng.uniform() * 5.0, 1.0);
    const auto opt = optimal_plan(field, {0, 0}, L, 1.0);
    ASSERT_EQ(r.counters.planner_calls, 1u);
    ASSERT_EQ(r.plan.total_reward, opt.total_reward);
    ASSERT_EQ(r.plan.visited, opt.visited);
  }
}

TEST(RecedingHorizon, EmptyFieldMakesOneCallPerStrip) {
  const auto r = receding_horizon_plan(field_of({}), {0, 0}, 10.0, 3.0, 1.0);
  EXPECT_EQ(r.plan.total_reward, 0.0);
  EXPECT_EQ(r.counters.planner_calls, 4u);
  EXPECT_EQ(r.counters.targets_visited, 0u);
  EXPECT_DOUBLE_EQ(r.counters.distance, 10.0);
  EXPECT_EQ(r.plan.end_state, (RobotState{10.0, 0.0}));
  EXPECT_THROW(receding_horizon_plan(field_of({}), {0, 0}, 10.0, 0.0, 1.0),
               std::invalid_argument);
}

TEST(RecedingHorizon, SixTargetsOverTwoStrips) {
  // Strip one ends at p2 = 0.9, which puts both high targets of strip two
  // out of reach; the one-shot optimum takes the lower route (12).
  const std::vector<Target> targets{{0.5, 0.0, 1}, {1.0, -0.5, 1}, {1.9, 0.9, 3},
                                    {2.5, -0.2, 4}, {3.0, 1.5, 2}, {3.8, -1.0, 6}};
  const auto field = field_of(targets);
  const auto r = receding_horizon_plan(field, {0, 0}, 4.0, 2.0, 1.0);
  const auto legs = oracle::enumerate_receding(targets, {0, 0}, 4.0, 2.0, 1.0);
  EXPECT_EQ(r.per_iteration, legs);
  EXPECT_EQ(r.per_iteration, (std::vector<double>{4, 2}));
  EXPECT_LT(r.plan.total_reward, optimal_plan(field, {0, 0}, 4.0, 1.0).total_reward);
  expect_feasible(r.plan, {0, 0}, 1.0);
}

TEST(RecedingHorizon, MatchesStripEnumerationAndNeverBeatsOptimal) {
  for (int c = 0; c < 300; ++c) {
    SeededRng rng(13, c);
    const auto targets = random_targets(rng, 12, 10.0, 5.0, c % 2 == 0);
    const auto field = field_of(targets);
    const double S = 1.0 + 6.0 * rng.uniform();
    const double alpha = 0.5 + rng.uniform();
    const auto r = receding_horizon_plan(field, {0, 0}, 10.0, S, alpha);
    ASSERT_EQ(r.per_iteration, oracle::enumerate_receding(targets, {0, 0}, 10.0, S, alpha))
        << "case " << c;
    ASSERT_EQ(r.counters.planner_calls, static_cast<std::uint64_t>(std::ceil(10.0 / S)));
    ASSERT_EQ(r.counters.targets_visited, r.plan.visited.size());
    ASSERT_LE(r.plan.total_reward, optimal_plan(field, {0, 0}, 10.0, alpha).total_reward);
    expect_feasible(r.plan, {0, 0}, alpha);
  }
}

TEST(RecedingUntilSuboptimal, ConstantRewardsAndUnreachableThresholdsHitTheCap) {
  const ContinuousStoppingRule never{0.5, 0.4, 200.0};
  const auto out = run_receding_until_suboptimal(1.0, kExp, 1.0, 4.0, never, 1, 0);
  EXPECT_TRUE(out.capped);
  EXPECT_EQ(out.distance, 200.0);
  EXPECT_EQ(out.iterations, 50u);
  EXPECT_THROW(run_receding_until_suboptimal(1.0, kExp, 1.0, 4.0,
                                             ContinuousStoppingRule{0.1, INFINITY, 10}, 1, 0),
               std::invalid_argument);
}

TEST(RecedingUntilSuboptimal, HighBaselineStopsAfterTheFirstStrip) {
  const ContinuousStoppingRule always{0.1, 1e9, 1e4};
  const auto out = run_receding_until_suboptimal(1.0, kExp, 1.0, 2.0, always, 3, 0);
  EXPECT_FALSE(out.capped);
  EXPECT_EQ(out.iterations, 1u);
  EXPECT_EQ(out.distance, 2.0);
}

TEST(EstimateContinuousRStar, TinyIntensityGivesZeroAndParallelismIsInvisible) {
  const auto zero = estimate_continuous_r_star(1e-9, kExp, 1.0, 10.0, 10, 1);
  EXPECT_EQ(zero.mean, 0.0);
  const auto a = estimate_continuous_r_star(1.0, kExp, 1.0, 20.0, 12, 4, 1);
  const auto b = estimate_continuous_r_star(1.0, kExp, 1.0, 20.0, 12, 4, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_err, b.std_err);
  EXPECT_THROW(estimate_continuous_r_star(1.0, kExp, 1.0, 20.0, 1, 4), std::invalid_argument);
}

TEST(PlanRecord, CarriesVisitedTargetsAndCounters) {
  const auto field = field_of({{1, 0, 5}, {2, 0.5, 3}});
  const auto plan = optimal_plan(field, {0, 0}, 3.0, 1.0);
  WorkloadCounters counters;
  counters.planner_calls = 1;
  const auto j = plan_record(7, 2, {{"alpha", 1.0}}, plan, counters);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 7u);
  EXPECT_EQ(j.at("total_reward").get<double>(), 8.0);
  EXPECT_EQ(j.at("visited").size(), 2u);
  EXPECT_EQ(j.at("counters").at("planner_calls").get<int>(), 1);
}

}  // namespace
}  // namespace mrm
