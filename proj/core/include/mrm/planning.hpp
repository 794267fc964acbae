#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mrm/distribution.hpp"
#include "mrm/poisson_field.hpp"
#include "mrm/stats.hpp"

namespace mrm {

/// Position of the robot; x1 doubles as the clock (t = x1 / v).
struct RobotState {
  double x1 = 0.0;
  double x2 = 0.0;
  bool operator==(const RobotState&) const = default;
};

struct ContinuousPlan {
  std::vector<Target> visited;  // strictly increasing p1
  double total_reward = 0.0;
  RobotState end_state;
  std::uint64_t dp_relaxations = 0;
};

struct WorkloadCounters {
  std::uint64_t dp_relaxations = 0;  // pairs examined by the chain DP
  std::uint64_t planner_calls = 0;
  std::uint64_t targets_visited = 0;  // one inference task per visit
  std::uint64_t candidates = 0;  // cone-feasible visible targets, summed over calls
  double distance = 0.0;
};

/// Longest-chain solver behind the planners.
///  * PairScan examines every ordered pair of candidates (N(N-1)/2 per
///    call) and is what the workload accounting measures.
///  * DominanceSweep maps the cone order to 2-D dominance in the rotated
///    coordinates (alpha p1 + p2, alpha p1 - p2) and runs a Fenwick-tree
///    sweep in O(N log N). Same optimum; used for large unlimited-sensing
///    fields.
enum class ChainSolver { PairScan, DominanceSweep };

/// Cone reachability under x1' = v, |x2'| <= w: the target must be ahead
/// and |p2 - x2| <= alpha (p1 - x1). The cone is closed.
bool reachable(const RobotState& from, const Target& to, double alpha) noexcept;

/// Best chain through `candidates` (sorted by strictly increasing p1, each
/// reachable from `start`). Rewards must be non-negative. Ties prefer the
/// earliest predecessor and the earliest chain end, so zero-reward targets
/// are never visited.
ContinuousPlan best_chain(std::span<const Target> candidates, const RobotState& start,
                          double alpha, ChainSolver solver);

/// T*_2(L): best cone-feasible chain over targets with p1 in
/// (start.x1, start.x1 + horizon]. The robot holds x2 after its final
/// pickup, so end_state = (start.x1 + horizon, last visited p2).
ContinuousPlan optimal_plan(const TargetSource& field, const RobotState& start, double horizon,
                            double alpha, ChainSolver solver = ChainSolver::PairScan);

struct RecedingHorizonResult {
  ContinuousPlan plan;
  WorkloadCounters counters;
  std::vector<double> per_iteration;  // T_i
};

/// Receding-horizon planner: ceil(L / S) iterations, each planning over the
/// strip (x1, x1 + S] restricted to the cone of the current state, executing
/// the chain and advancing x1 by S (the final strip is clipped at L). The
/// lateral state leaving a strip is the last visited p2, unchanged when
/// nothing was visited. Throws std::invalid_argument unless S > 0.
RecedingHorizonResult receding_horizon_plan(const TargetSource& field, const RobotState& start,
                                            double length, double sensing_range, double alpha,
                                            ChainSolver solver = ChainSolver::PairScan);

struct ContinuousStoppingRule {
  double delta = 0.1;
  double baseline = 0.0;  // reward per unit distance
  double max_length = 1e4;
};

struct ContinuousStoppingOutcome {
  double distance = 0.0;  // strips travelled times S
  std::uint64_t iterations = 0;
  bool capped = false;
};

/// Receding-horizon planner on a lazily generated whole-plane field: stops
/// after the first strip whose reward satisfies T_i / S < baseline - delta
/// (that strip counts as travelled) or once max_length is reached.
/// Throws std::invalid_argument unless S > 0 and the baseline is finite.
ContinuousStoppingOutcome run_receding_until_suboptimal(double lambda,
                                                        const RewardDistribution& dist,
                                                        double alpha, double sensing_range,
                                                        const ContinuousStoppingRule& rule,
                                                        std::uint64_t seed, std::uint64_t stream);

/// Cone of half-slope alpha and depth L rooted at the origin.
inline Region reachable_cone(double length, double alpha) {
  return ConeRegion{length, alpha, 0.0};
}

/// Monte-Carlo mean and standard error of T*_2(L) / L over independent
/// fields on the reachable cone (trial t uses stream t).
/// Throws std::invalid_argument if trials < 2.
Estimate estimate_continuous_r_star(double lambda, const RewardDistribution& dist, double alpha,
                                    double length, std::uint32_t trials, std::uint64_t seed,
                                    unsigned parallelism = 1,
                                    ChainSolver solver = ChainSolver::DominanceSweep);

/// One JSON-lines plan dump record:
/// {seed, stream, params, total_reward, visited: [[p1,p2,r]...], counters}.
nlohmann::json plan_record(std::uint64_t seed, std::uint64_t stream, const nlohmann::json& params,
                           const ContinuousPlan& plan, const WorkloadCounters& counters);

}  // namespace mrm
