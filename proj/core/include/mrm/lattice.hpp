#pragma once

// Last-passage percolation on the two-dimensional directed lattice N^2.
//
// Conventions used throughout this header:
//  * Path length n counts the vertices a path crosses, origin included, so
//    an n-vertex path from the origin ends on level n - 1 and R*_2(n) is
//    T*_2(n) / n.
//  * Vertex (v1, v2) sits on level |v| = v1 + v2. A step increments exactly
//    one coordinate, so level k is reached after k steps.
//  * On equal values the DP prefers the predecessor in the v1 direction,
//    which makes every returned argmax path deterministic.

#include <cstdint>
#include <optional>
#include <vector>

#include "mrm/distribution.hpp"
#include "mrm/stats.hpp"

namespace mrm {

struct Vertex {
  std::uint32_t v1 = 0;
  std::uint32_t v2 = 0;

  std::uint64_t level() const noexcept { return std::uint64_t{v1} + v2; }
  bool operator==(const Vertex&) const = default;
};

/// Rewards of a lattice read straight from a keyed counter-based stream:
/// r(v) = F^{-1}(U(seed, stream, v)). Nothing is stored, so arbitrarily
/// distant vertices can be queried and every query is reproducible.
class LazyLatticeRewards {
 public:
  LazyLatticeRewards(RewardDistribution dist, std::uint64_t seed, std::uint64_t stream)
      : dist_(dist), uniforms_(seed, stream) {}

  double operator()(std::uint32_t v1, std::uint32_t v2) const noexcept {
    return dist_.quantile(uniforms_.at(v1, v2));
  }
  /// row[a] = r(a, level - a) for a = 0..level; row is resized to level + 1.
  void fill_level(std::uint32_t level, std::vector<double>& row) const {
    row.resize(std::size_t{level} + 1);
    for (std::uint32_t a = 0; a <= level; ++a) row[a] = uniforms_.at(a, level - a);
    dist_.quantile_in_place(row);
  }
  const RewardDistribution& distribution() const noexcept { return dist_; }

 private:
  RewardDistribution dist_;
  KeyedUniform uniforms_;
};

/// Materialized triangular wedge {v : |v| <= horizon} of i.i.d. rewards.
class LatticeField {
 public:
  /// Draws every wedge reward from the keyed stream, so the wedge agrees
  /// vertex-by-vertex with LazyLatticeRewards(dist, seed, stream) and with
  /// any larger wedge of the same seed.
  static LatticeField generate(const RewardDistribution& dist, std::uint32_t horizon,
                               std::uint64_t seed, std::uint64_t stream = 0);

  /// Hand-specified rewards listed level by level, and within a level by
  /// increasing v1: r(0,0), r(0,1), r(1,0), r(0,2), r(1,1), r(2,0), ...
  /// Throws std::invalid_argument unless the count matches the horizon.
  static LatticeField from_levels(std::uint32_t horizon, std::vector<double> rewards);

  std::uint32_t horizon() const noexcept { return horizon_; }
  bool contains(Vertex v) const noexcept { return v.level() <= horizon_; }
  /// Throws std::out_of_range outside the wedge.
  double reward(Vertex v) const;
  double operator()(std::uint32_t v1, std::uint32_t v2) const noexcept {
    return rewards_[index(v1, v2)];
  }
  const std::optional<RewardDistribution>& distribution() const noexcept { return dist_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  static std::size_t index(std::uint32_t v1, std::uint32_t v2) noexcept {
    const std::size_t level = std::size_t{v1} + v2;
    return level * (level + 1) / 2 + v1;
  }

  std::uint32_t horizon_ = 0;
  std::vector<double> rewards_;
  std::optional<RewardDistribution> dist_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

struct LatticePath {
  double total_reward = 0.0;
  std::vector<Vertex> vertices;  // root first
  std::uint64_t relaxation_count = 0;
};

/// T*_2(n): best monotone path from the origin crossing n vertices, origin
/// reward included. relaxation_count is n (n - 1), the edge count of the
/// wedge it sweeps. Throws std::invalid_argument for n == 0 and
/// std::out_of_range if n - 1 exceeds the field horizon.
LatticePath optimal_total_reward(const LatticeField& field, std::uint32_t n);

/// T*_2(v): best monotone path from the origin ending exactly at v.
/// Throws std::out_of_range for vertices outside the wedge.
double optimal_reward_to_vertex(const LatticeField& field, Vertex v);

/// Point-to-point value T*_2(v) on a lazily generated field; O(v1 * v2) time
/// and O(min(v1, v2)) memory.
double optimal_reward_to_vertex(const LazyLatticeRewards& rewards, Vertex v);

/// T*_2(n) for every n in `ns` (ascending, >= 1) from a single sweep over
/// the wedge of a lazily generated field. Common random numbers across n.
std::vector<double> optimal_totals_at(const LazyLatticeRewards& rewards,
                                      const std::vector<std::uint32_t>& ns);

/// Limit shape g(v) = lim T*_2(floor(k v)) / k where it is known in closed
/// form: Exponential (g = (sqrt v1 + sqrt v2)^2 / rate) and Geometric
/// (g = (v1 + 2 sqrt(v1 v2 (1 - p)) + v2) / p). std::nullopt otherwise.
std::optional<double> shape_function_closed_form(const RewardDistribution& dist, double v1,
                                                 double v2);

/// lim E[T*_2(n)] / n = mu + sigma for Exponential and Geometric rewards;
/// std::nullopt where no closed form is known.
std::optional<double> r_star_closed_form(const RewardDistribution& dist);

struct LatticePlanResult {
  double total_reward = 0.0;
  std::vector<double> per_leg_rewards;  // T_i
  Vertex end_vertex;
  std::uint32_t legs = 0;
  std::uint64_t relaxation_count = 0;
};

/// Limited-sensing planner over an n-vertex mission: each leg solves the
/// best path collecting the next `m` rewards ahead of the current vertex,
/// executes it and replans. The first leg starts by collecting the origin;
/// later legs collect only vertices beyond their root, so every leg holds
/// exactly m rewards, no reward is counted twice and the mission ends on
/// level n - 1. If m does not divide n the final leg collects the
/// remainder. Throws std::invalid_argument if m is 0 or exceeds n, and
/// std::out_of_range if the wedge is too small.
LatticePlanResult iterative_plan(const LatticeField& field, std::uint32_t m, std::uint32_t n);

struct StoppingRule {
  double delta = 0.1;
  double baseline = 0.0;
  std::uint64_t max_steps = 1'000'000;
};

struct StoppingOutcome {
  std::uint64_t distance = 0;  // vertices crossed, legs * m
  std::uint64_t legs = 0;
  bool capped = false;  // rule never fired before max_steps
};

/// Runs the limited-sensing planner on a lazily generated field until a leg
/// collects T_i / m < baseline - delta (that leg counts as travelled) or
/// max_steps is reached. Legs hold m rewards each, as in iterative_plan.
/// Throws std::invalid_argument if m is 0 or the baseline is not finite.
StoppingOutcome run_until_suboptimal(const RewardDistribution& dist, std::uint32_t m,
                                     const StoppingRule& rule, std::uint64_t seed,
                                     std::uint64_t stream);

/// Monte-Carlo mean and standard error of R*_2(n) = T*_2(n) / n over
/// `trials` independent fields (trial t uses stream t).
/// Throws std::invalid_argument if trials < 2 or n == 0.
Estimate estimate_r_star(const RewardDistribution& dist, std::uint32_t n, std::uint32_t trials,
                         std::uint64_t seed, unsigned parallelism = 1);

}  // namespace mrm
