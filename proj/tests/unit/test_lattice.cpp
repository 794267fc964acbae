#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "mrm/lattice.hpp"
#include "mrm/oracle.hpp"

namespace mrm {
namespace {

using testing::random_wedge;
using testing::uniform_int;

// Level order: r(0,0) | r(0,1) r(1,0) | r(0,2) r(1,1) r(2,0)
LatticeField three_level_example() {
  return LatticeField::from_levels(2, {1, 2, 3, 0, 5, 0});
}

bool is_monotone_path(const std::vector<Vertex>& path) {
  if (path.empty() || !(path.front() == Vertex{0, 0})) return false;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vertex a = path[i - 1], b = path[i];
    const bool right = b.v1 == a.v1 + 1 && b.v2 == a.v2;
    const bool up = b.v1 == a.v1 && b.v2 == a.v2 + 1;
    if (!right && !up) return false;
  }
  return true;
}

double path_sum(const LatticeField& f, const std::vector<Vertex>& path) {
  double s = 0.0;
  for (const Vertex& v : path) s += f.reward(v);
  return s;
}

TEST(LatticeField, FromLevelsOrdering) {
  const LatticeField f = three_level_example();
  EXPECT_EQ(f.reward({0, 0}), 1);
  EXPECT_EQ(f.reward({0, 1}), 2);
  EXPECT_EQ(f.reward({1, 0}), 3);
  EXPECT_EQ(f.reward({1, 1}), 5);
  EXPECT_THROW(f.reward({2, 1}), std::out_of_range);
  EXPECT_THROW(LatticeField::from_levels(2, {1, 2, 3}), std::invalid_argument);
}

TEST(LatticeField, GeneratedWedgeMatchesLazyRewards) {
  const auto dist = RewardDistribution::exponential(1.0);
  const LatticeField f = LatticeField::generate(dist, 20, 9, 4);
  const LazyLatticeRewards lazy(dist, 9, 4);
  std::vector<double> row;
  for (std::uint32_t level = 0; level <= 20; ++level) {
    lazy.fill_level(level, row);
    for (std::uint32_t a = 0; a <= level; ++a) {
      EXPECT_EQ(f(a, level - a), lazy(a, level - a));
      EXPECT_EQ(row[a], lazy(a, level - a));
    }
  }
  const LatticeField larger = LatticeField::generate(dist, 30, 9, 4);
  EXPECT_EQ(larger(7, 11), f(7, 11));
}

TEST(OptimalTotalReward, ThreeVertexExample) {
  const LatticeField f = three_level_example();
  const LatticePath p = optimal_total_reward(f, 3);
  EXPECT_EQ(p.total_reward, 9.0);
  const std::vector<Vertex> expected{{0, 0}, {1, 0}, {1, 1}};
  EXPECT_EQ(p.vertices, expected);
  EXPECT_EQ(p.relaxation_count, 6u);
  EXPECT_EQ(oracle::enumerate_lattice_paths(f, 3).total, 9.0);
}

TEST(OptimalTotalReward, SingleVertexIsTheOrigin) {
  const LatticeField f = three_level_example();
  const LatticePath p = optimal_total_reward(f, 1);
  EXPECT_EQ(p.total_reward, 1.0);
  EXPECT_EQ(p.vertices.size(), 1u);
}

TEST(OptimalTotalReward, ZeroField) {
  const LatticeField f = LatticeField::from_levels(4, std::vector<double>(15, 0.0));
  for (std::uint32_t n = 1; n <= 5; ++n) {
    const LatticePath p = optimal_total_reward(f, n);
    EXPECT_EQ(p.total_reward, 0.0);
    EXPECT_EQ(p.vertices.size(), n);
    EXPECT_TRUE(is_monotone_path(p.vertices));
  }
}

TEST(OptimalTotalReward, RejectsBadLengths) {
  const LatticeField f = three_level_example();
  EXPECT_THROW(optimal_total_reward(f, 0), std::invalid_argument);
  EXPECT_THROW(optimal_total_reward(f, 4), std::out_of_range);
}

TEST(OptimalTotalReward, RelaxationCountIsWedgeEdgeCount) {
  SeededRng rng(1, 0);
  const LatticeField f = random_wedge(rng, 30, false);
  for (std::uint32_t n : {1u, 2u, 5u, 31u}) {
    EXPECT_EQ(optimal_total_reward(f, n).relaxation_count, std::uint64_t{n} * (n - 1));
  }
}

TEST(OptimalTotalReward, EqualsEnumerationOnRandomWedges) {
  for (int c = 0; c < 1000; ++c) {
    SeededRng rng(2024, c);
    const bool integer = c % 2 == 0;
    const LatticeField f = random_wedge(rng, 7, integer);
    const std::uint32_t n = uniform_int(rng, 1, 8);
    const LatticePath dp = optimal_total_reward(f, n);
    const oracle::LatticeBest brute = oracle::enumerate_lattice_paths(f, n);
    ASSERT_EQ(dp.total_reward, brute.total) << "case " << c;
    ASSERT_EQ(brute.paths_examined, std::uint64_t{1} << (n - 1));
    ASSERT_TRUE(is_monotone_path(dp.vertices));
    ASSERT_EQ(dp.vertices.size(), n);
    ASSERT_EQ(path_sum(f, dp.vertices), dp.total_reward) << "case " << c;
    if (!integer) ASSERT_EQ(dp.vertices, brute.path) << "case " << c;
  }
}

TEST(OptimalRewardToVertex, Examples) {
  const LatticeField two = LatticeField::from_levels(2, {1, 2, 3, 0, 4, 0});
  EXPECT_EQ(optimal_reward_to_vertex(two, {1, 1}), 8.0);
  EXPECT_EQ(optimal_reward_to_vertex(two, {0, 0}), 1.0);
  EXPECT_THROW(optimal_reward_to_vertex(two, {2, 1}), std::out_of_range);
}

TEST(OptimalRewardToVertex, EqualsEnumerationAndLazyVariant) {
  const auto dist = RewardDistribution::exponential(1.0);
  for (int c = 0; c < 200; ++c) {
    SeededRng rng(77, c);
    const LatticeField f = LatticeField::generate(dist, 12, 5, c);
    const Vertex v{uniform_int(rng, 0, 6), uniform_int(rng, 0, 6)};
    const double dp = optimal_reward_to_vertex(f, v);
    ASSERT_EQ(dp, oracle::enumerate_paths_to_vertex(f, v)) << "case " << c;
    ASSERT_EQ(dp, optimal_reward_to_vertex(LazyLatticeRewards(dist, 5, c), v));
  }
}

TEST(OptimalTotalReward, DominatesEveryEndpointOnItsLevel) {
  for (int c = 0; c < 100; ++c) {
    SeededRng rng(31, c);
    const LatticeField f = random_wedge(rng, 10, false);
    for (std::uint32_t level = 0; level <= 10; ++level) {
      const double best = optimal_total_reward(f, level + 1).total_reward;
      for (std::uint32_t a = 0; a <= level; ++a) {
        ASSERT_LE(optimal_reward_to_vertex(f, {a, level - a}), best);
      }
    }
  }
}

TEST(OptimalTotalReward, NonDecreasingInLengthAndSuperadditive) {
  for (int c = 0; c < 100; ++c) {
    SeededRng rng(41, c);
    const LatticeField f = random_wedge(rng, 20, c % 2 == 0);
    std::vector<double> t(22);
    for (std::uint32_t n = 1; n <= 21; ++n) t[n] = optimal_total_reward(f, n).total_reward;
    for (std::uint32_t n = 2; n <= 21; ++n) ASSERT_GE(t[n], t[n - 1]);
    // Concatenating a best j-vertex path with a best path of the shifted
    // field cannot beat the global optimum.
    const auto plan = iterative_plan(f, 7, 21);
    ASSERT_LE(plan.total_reward, t[21] * (1.0 + 1e-12));
  }
}

TEST(OptimalTotalsAt, MatchesMaterializedSolver) {
  const auto dist = RewardDistribution::pareto(1.0, 1.5);
  const LazyLatticeRewards lazy(dist, 3, 8);
  const LatticeField f = LatticeField::generate(dist, 60, 3, 8);
  const std::vector<std::uint32_t> ns{1, 2, 10, 33, 61};
  const std::vector<double> totals = optimal_totals_at(lazy, ns);
  ASSERT_EQ(totals.size(), ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    EXPECT_EQ(totals[i], optimal_total_reward(f, ns[i]).total_reward);
  }
  EXPECT_THROW(optimal_totals_at(lazy, {0, 3}), std::invalid_argument);
}

TEST(ClosedForms, ShapeFunction) {
  const auto ex = RewardDistribution::exponential(1.0);
  EXPECT_NEAR(*shape_function_closed_form(ex, 1, 1), 4.0, 1e-12);
  EXPECT_NEAR(*shape_function_closed_form(ex, 4, 1), 9.0, 1e-12);
  EXPECT_NEAR(*shape_function_closed_form(RewardDistribution::geometric(0.5), 1, 1),
              4.0 + 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(shape_function_closed_form(RewardDistribution::bernoulli(0.5), 1, 1));
}

TEST(ClosedForms, RStar) {
  EXPECT_NEAR(*r_star_closed_form(RewardDistribution::exponential(1.0)), 2.0, 1e-12);
  EXPECT_NEAR(*r_star_closed_form(RewardDistribution::geometric(0.5)), 2.0 + std::sqrt(2.0),
              1e-12);
  EXPECT_FALSE(r_star_closed_form(RewardDistribution::bernoulli(0.5)));
  EXPECT_FALSE(r_star_closed_form(RewardDistribution::pareto(1.0, 1.5)));
}

TEST(IterativePlan, SingleLegEqualsOptimal) {
  for (int c = 0; c < 50; ++c) {
    SeededRng rng(51, c);
    const LatticeField f = random_wedge(rng, 12, false);
    const std::uint32_t n = uniform_int(rng, 1, 13);
    const LatticePlanResult plan = iterative_plan(f, n, n);
    ASSERT_EQ(plan.per_leg_rewards.size(), 1u);
    ASSERT_EQ(plan.per_leg_rewards[0], optimal_total_reward(f, n).total_reward);
  }
}

TEST(IterativePlan, TwoLegsMatchEnumerationLegByLeg) {
  for (int c = 0; c < 200; ++c) {
    SeededRng rng(61, c);
    const LatticeField f = random_wedge(rng, 3, false);
    const LatticePlanResult plan = iterative_plan(f, 2, 4);
    const std::vector<double> legs = oracle::enumerate_iterative_legs(f, 2, 4);
    ASSERT_EQ(plan.per_leg_rewards, legs) << "case " << c;
    ASSERT_EQ(plan.legs, 2u);
    ASSERT_EQ(plan.end_vertex.level(), 3u);
  }
}

TEST(IterativePlan, LegsMatchEnumerationIncludingRemainder) {
  for (int c = 0; c < 300; ++c) {
    SeededRng rng(71, c);
    // Integer rewards tie often and the two break ties differently, which
    // moves later leg roots; only the first leg is comparable there.
    const bool integer = c % 3 == 0;
    const LatticeField f = random_wedge(rng, 11, integer);
    const std::uint32_t n = uniform_int(rng, 1, 12);
    const std::uint32_t m = uniform_int(rng, 1, std::min(n, 6u));
    const LatticePlanResult plan = iterative_plan(f, m, n);
    const std::vector<double> legs = oracle::enumerate_iterative_legs(f, m, n);
    if (integer) {
      ASSERT_EQ(plan.per_leg_rewards.front(), legs.front()) << "case " << c;
    } else {
      ASSERT_EQ(plan.per_leg_rewards, legs) << "case " << c;
    }
    double sum = 0.0;
    for (double t : plan.per_leg_rewards) sum += t;
    ASSERT_EQ(plan.total_reward, sum);
    ASSERT_EQ(plan.legs, (n + m - 1) / m);
    ASSERT_EQ(plan.end_vertex.level(), n - 1);
    ASSERT_LE(plan.total_reward, optimal_total_reward(f, n).total_reward * (1.0 + 1e-12));
  }
}

TEST(IterativePlan, RejectsBadArguments) {
  const LatticeField f = three_level_example();
  EXPECT_THROW(iterative_plan(f, 0, 3), std::invalid_argument);
  EXPECT_THROW(iterative_plan(f, 4, 3), std::invalid_argument);
  EXPECT_THROW(iterative_plan(f, 1, 4), std::out_of_range);
}

TEST(RunUntilSuboptimal, UnreachableThresholdHitsTheCap) {
  const StoppingRule rule{0.5, 0.5, 1000};
  const StoppingOutcome out =
      run_until_suboptimal(RewardDistribution::exponential(1.0), 4, rule, 1, 0);
  EXPECT_TRUE(out.capped);
  EXPECT_GE(out.distance, 1000u);
}

TEST(RunUntilSuboptimal, ConstantRewardsNeverStop) {
  for (std::uint32_t m : {1u, 3u, 8u}) {
    const StoppingOutcome out = run_until_suboptimal(RewardDistribution::constant(1.0), m,
                                                     StoppingRule{0.1, 1.0, 500}, 1, 0);
    EXPECT_TRUE(out.capped);
  }
}

TEST(RunUntilSuboptimal, LowerBaselineNeverStopsEarlierOnTheSameField) {
  const auto dist = RewardDistribution::exponential(1.0);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto hi = run_until_suboptimal(dist, 4, StoppingRule{0.1, 2.0, 100000}, 3, s);
    const auto lo = run_until_suboptimal(dist, 4, StoppingRule{0.1, 1.6, 100000}, 3, s);
    ASSERT_LE(hi.distance, lo.distance);
    ASSERT_EQ(hi.distance, hi.legs * 4);
  }
}

TEST(RunUntilSuboptimal, RejectsBadArguments) {
  const auto dist = RewardDistribution::exponential(1.0);
  EXPECT_THROW(run_until_suboptimal(dist, 0, StoppingRule{}, 1, 0), std::invalid_argument);
  EXPECT_THROW(run_until_suboptimal(dist, 2, StoppingRule{0.1, INFINITY, 10}, 1, 0),
               std::invalid_argument);
}

TEST(EstimateRStar, ConstantIsExact) {
  const Estimate e = estimate_r_star(RewardDistribution::constant(1.0), 50, 10, 1);
  EXPECT_EQ(e.mean, 1.0);
  EXPECT_EQ(e.std_err, 0.0);
  EXPECT_THROW(estimate_r_star(RewardDistribution::constant(1.0), 50, 1, 1),
               std::invalid_argument);
}

TEST(EstimateRStar, IndependentOfParallelism) {
  const auto dist = RewardDistribution::exponential(1.0);
  const Estimate a = estimate_r_star(dist, 40, 20, 5, 1);
  const Estimate b = estimate_r_star(dist, 40, 20, 5, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_err, b.std_err);
}

}  // namespace
}  // namespace mrm
