#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "mrm/bayes.hpp"
#include "mrm/oracle.hpp"

namespace mrm {
namespace {

using testing::uniform_int;

GaussianBelief fold(GaussianBelief b, const std::vector<Measurement>& ms) {
  for (const auto& m : ms) b = update(b, m);
  return b;
}

ContinuousPlan plan_with_rewards(const std::vector<double>& rewards) {
  ContinuousPlan plan;
  double p1 = 0.0;
  for (double r : rewards) {
    plan.visited.push_back({p1 += 1.0, 0.0, r});
    plan.total_reward += r;
  }
  return plan;
}

TEST(Update, Examples) {
  const auto a = update({0, 1}, {0, 1});
  EXPECT_EQ(a.mean, 0.0);
  EXPECT_EQ(a.precision, 2.0);
  const auto b = fold({0, 1}, {{1, 2}, {4, 3}});
  EXPECT_EQ(b.precision, 6.0);
  EXPECT_NEAR(b.mean, 14.0 / 6.0, 1e-15);
  const auto grid = oracle::grid_posterior({0, 1}, {{1, 2}, {4, 3}});
  EXPECT_NEAR(grid.mean, 14.0 / 6.0, 1e-9);
  EXPECT_NEAR(grid.precision, 6.0, 1e-6);
}

TEST(Update, RejectsNonPositivePrecision) {
  EXPECT_THROW(update({0, 0}, {1, 1}), std::invalid_argument);
  EXPECT_THROW(update({0, 1}, {1, 0}), std::invalid_argument);
}

TEST(Update, UnitMeasurementsAddUp) {
  GaussianBelief b{3.0, 2.5};
  for (int i = 0; i < 40; ++i) b = update(b, {static_cast<double>(i), 1.0});
  EXPECT_EQ(b.precision, 42.5);
}

TEST(Update, MatchesGridIntegrationOracle) {
  for (int c = 0; c < 100; ++c) {
    SeededRng rng(404, c);
    const GaussianBelief prior{4.0 * rng.normal(), 0.2 + 3.0 * rng.uniform()};
    std::vector<Measurement> ms(uniform_int(rng, 1, 6));
    for (auto& m : ms) m = {prior.mean + 2.0 * rng.normal(), 0.1 + 4.0 * rng.uniform()};
    const auto exact = fold(prior, ms);
    const auto grid = oracle::grid_posterior(prior, ms);
    ASSERT_NEAR(grid.precision, exact.precision, 1e-6 * exact.precision) << "case " << c;
    ASSERT_NEAR(grid.mean, exact.mean, 1e-6 * std::max(1.0, std::abs(exact.mean)))
        << "case " << c;
  }
}

TEST(Update, PrecisionIsAdditiveAndOrderFree) {
  for (int c = 0; c < 200; ++c) {
    SeededRng rng(505, c);
    const GaussianBelief prior{rng.normal(), 1.0};
    std::vector<Measurement> ms(uniform_int(rng, 1, 20));
    double total = prior.precision;
    for (auto& m : ms) {
      m = {rng.normal(), std::floor(1.0 + 8.0 * rng.uniform())};
      total += m.precision;
    }
    const auto a = fold(prior, ms);
    ASSERT_EQ(a.precision, total);
    std::reverse(ms.begin(), ms.end());
    std::rotate(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
    const auto b = fold(prior, ms);
    ASSERT_NEAR(a.mean, b.mean, 1e-12);
    ASSERT_NEAR(a.precision, b.precision, 1e-12);
  }
}

TEST(MissionEstimation, EmptyPlanLeavesBeliefUnchanged) {
  SeededRng rng(1, 0);
  const auto est = simulate_mission_estimation(ContinuousPlan{}, 5.0, {0.5, 2.0}, rng);
  ASSERT_EQ(est.trajectory.size(), 1u);
  EXPECT_EQ(est.trajectory[0].mean, 0.5);
  EXPECT_EQ(est.final_variance, 0.5);
}

TEST(MissionEstimation, FinalVarianceIsInverseOfPriorPlusReward) {
  SeededRng rng(2, 0);
  const auto plan = plan_with_rewards({1, 2, 3, 4});
  const auto est = simulate_mission_estimation(plan, 0.0, {0.0, 1.0}, rng);
  EXPECT_EQ(est.final_variance, 1.0 / 11.0);
  EXPECT_EQ(est.trajectory.size(), 5u);
  const auto with_zero = simulate_mission_estimation(plan_with_rewards({0, 10}), 0.0, {}, rng);
  EXPECT_EQ(with_zero.trajectory.size(), 2u);
  EXPECT_EQ(with_zero.final_variance, 1.0 / 11.0);
}

TEST(MissionEstimation, PosteriorMeanIsConsistent) {
  const auto plan = plan_with_rewards(std::vector<double>(1000, 1.0));
  int inside = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    SeededRng rng(3, t);
    const auto est = simulate_mission_estimation(plan, 5.0, {0.0, 1.0}, rng);
    inside += std::abs(est.trajectory.back().mean - 5.0) < 4.0 / std::sqrt(1001.0);
  }
  EXPECT_GE(inside, 475);
}

TEST(Ugs, ZeroIntensityGainsNothing) {
  const auto cmp = compare_ugs_strategies(1e-9, 1.0, 20.0, 1.0, 4, 1);
  for (const auto* s : {&cmp.homogeneous, &cmp.randomized}) {
    ASSERT_EQ(s->checkpoints.size(), 10u);
    for (const auto& c : s->checkpoints) {
      EXPECT_EQ(c.gain_per_distance.mean, 0.0);
      EXPECT_EQ(c.mean_posterior_variance, 1.0);
    }
  }
  EXPECT_EQ(cmp.paired_gap.mean, 0.0);
}

TEST(Ugs, CheckpointsAndArgumentChecks) {
  const auto cmp = compare_ugs_strategies(1.0, 1.0, 30.0, 1.0, 8, 2);
  for (int k = 0; k < 10; ++k) {
    EXPECT_DOUBLE_EQ(cmp.homogeneous.checkpoints[k].distance, 3.0 * (k + 1));
    if (k > 0) {
      EXPECT_LE(cmp.randomized.checkpoints[k].mean_posterior_variance,
                cmp.randomized.checkpoints[k - 1].mean_posterior_variance);
    }
  }
  EXPECT_THROW(compare_ugs_strategies(1.0, 0.0, 30.0, 1.0, 8, 2), std::invalid_argument);
  EXPECT_THROW(compare_ugs_strategies(1.0, 1.0, 30.0, 1.0, 1, 2), std::invalid_argument);
}

TEST(Ugs, CsvHasOneRowPerStrategyAndCheckpoint) {
  const auto cmp = compare_ugs_strategies(1.0, 1.0, 10.0, 1.0, 4, 3, 2);
  std::stringstream ss;
  write_ugs_csv(ss, cmp);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "strategy,L,lambda,alpha,mean_gain,stderr_gain,mean_posterior_variance");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 20);
}

}  // namespace
}  // namespace mrm
