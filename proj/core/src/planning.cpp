#include "mrm/planning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "mrm/parallel.hpp"

namespace mrm {

namespace {

constexpr std::int64_t kNoPredecessor = -1;

struct ChainTable {
  std::vector<double> value;
  std::vector<std::int64_t> pred;
  std::uint64_t relaxations = 0;
};

ChainTable pair_scan(std::span<const Target> c, double alpha) {
  const std::size_t n = c.size();
  ChainTable t;
  t.value.resize(n);
  t.pred.assign(n, kNoPredecessor);
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = c[i].p1;
    const double p2 = c[i].p2;
    double best = 0.0;  // chain starting at the robot's state
    std::int64_t arg = kNoPredecessor;
    for (std::size_t j = 0; j < i; ++j) {
      if (std::fabs(p2 - c[j].p2) <= alpha * (p1 - c[j].p1) && t.value[j] > best) {
        best = t.value[j];
        arg = static_cast<std::int64_t>(j);
      }
    }
    t.relaxations += i;
    t.value[i] = c[i].reward + best;
    t.pred[i] = arg;
  }
  return t;
}

// Prefix-maximum Fenwick tree over rotated-coordinate ranks. Entries compare
// by value, then by lower candidate index.
class MaxFenwick {
 public:
  explicit MaxFenwick(std::size_t n) : value_(n + 1, 0.0), index_(n + 1, kNoPredecessor) {}

  std::pair<double, std::int64_t> prefix(std::size_t rank, std::uint64_t& ops) const {
    double best = 0.0;
    std::int64_t arg = kNoPredecessor;
    for (std::size_t k = rank + 1; k > 0; k &= k - 1) {
      ++ops;
      if (better(value_[k], index_[k], best, arg)) {
        best = value_[k];
        arg = index_[k];
      }
    }
    return {best, arg};
  }

  void update(std::size_t rank, double v, std::int64_t idx, std::uint64_t& ops) {
    for (std::size_t k = rank + 1; k < value_.size(); k += k & (~k + 1)) {
      ++ops;
      if (better(v, idx, value_[k], index_[k])) {
        value_[k] = v;
        index_[k] = idx;
      }
    }
  }

 private:
  static bool better(double v, std::int64_t i, double best, std::int64_t arg) {
    if (i == kNoPredecessor) return false;
    if (v != best) return v > best;
    return arg == kNoPredecessor ? v > 0.0 : i < arg;
  }

  std::vector<double> value_;
  std::vector<std::int64_t> index_;
};

ChainTable dominance_sweep(std::span<const Target> c, double alpha) {
  const std::size_t n = c.size();
  ChainTable t;
  t.value.resize(n);
  t.pred.assign(n, kNoPredecessor);
  std::vector<double> u(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = alpha * c[i].p1 + c[i].p2;
    w[i] = alpha * c[i].p1 - c[i].p2;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (u[a] != u[b]) return u[a] < u[b];
    if (w[a] != w[b]) return w[a] < w[b];
    return a < b;
  });
  std::vector<double> ranks = w;
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

  MaxFenwick tree(ranks.size());
  for (std::size_t i : order) {
    const auto rank = static_cast<std::size_t>(
        std::lower_bound(ranks.begin(), ranks.end(), w[i]) - ranks.begin());
    const auto [best, arg] = tree.prefix(rank, t.relaxations);
    t.value[i] = c[i].reward + best;
    t.pred[i] = arg;
    tree.update(rank, t.value[i], static_cast<std::int64_t>(i), t.relaxations);
  }
  return t;
}

}  // namespace

bool reachable(const RobotState& from, const Target& to, double alpha) noexcept {
  const double ahead = to.p1 - from.x1;
  return ahead >= 0.0 && std::fabs(to.p2 - from.x2) <= alpha * ahead;
}

ContinuousPlan best_chain(std::span<const Target> candidates, const RobotState& start,
                          double alpha, ChainSolver solver) {
  const ChainTable t = solver == ChainSolver::PairScan ? pair_scan(candidates, alpha)
                                                       : dominance_sweep(candidates, alpha);
  ContinuousPlan plan;
  plan.dp_relaxations = t.relaxations;
  plan.end_state = start;
  std::int64_t end = kNoPredecessor;
  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (t.value[i] > best) {
      best = t.value[i];
      end = static_cast<std::int64_t>(i);
    }
  }
  for (std::int64_t i = end; i != kNoPredecessor; i = t.pred[static_cast<std::size_t>(i)]) {
    plan.visited.push_back(candidates[static_cast<std::size_t>(i)]);
  }
  std::reverse(plan.visited.begin(), plan.visited.end());
  for (const auto& target : plan.visited) plan.total_reward += target.reward;
  if (!plan.visited.empty()) plan.end_state.x2 = plan.visited.back().p2;
  return plan;
}

namespace {

std::vector<Target> cone_candidates(const TargetSource& field, const RobotState& from,
                                    double depth, double alpha) {
  std::vector<Target> window =
      field.targets_in(from.x1, from.x1 + depth, from.x2 - alpha * depth, from.x2 + alpha * depth);
  std::erase_if(window, [&](const Target& t) { return !reachable(from, t, alpha); });
  return window;
}

}  // namespace

ContinuousPlan optimal_plan(const TargetSource& field, const RobotState& start, double horizon,
                            double alpha, ChainSolver solver) {
  const std::vector<Target> candidates = cone_candidates(field, start, horizon, alpha);
  ContinuousPlan plan = best_chain(candidates, start, alpha, solver);
  plan.end_state.x1 = start.x1 + horizon;
  return plan;
}

RecedingHorizonResult receding_horizon_plan(const TargetSource& field, const RobotState& start,
                                            double length, double sensing_range, double alpha,
                                            ChainSolver solver) {
  if (!(sensing_range > 0.0)) throw std::invalid_argument("sensing range must be > 0");
  RecedingHorizonResult out;
  out.plan.end_state = start;
  const auto iterations = static_cast<std::uint64_t>(std::ceil(length / sensing_range));
  RobotState here = start;
  const double finish = start.x1 + length;
  for (std::uint64_t k = 0; k < iterations; ++k) {
    const double depth = std::min(sensing_range, finish - here.x1);
    const std::vector<Target> candidates = cone_candidates(field, here, depth, alpha);
    const ContinuousPlan leg = best_chain(candidates, here, alpha, solver);

    out.per_iteration.push_back(leg.total_reward);
    out.plan.visited.insert(out.plan.visited.end(), leg.visited.begin(), leg.visited.end());
    out.plan.total_reward += leg.total_reward;
    out.plan.dp_relaxations += leg.dp_relaxations;
    out.counters.dp_relaxations += leg.dp_relaxations;
    out.counters.planner_calls += 1;
    out.counters.targets_visited += leg.visited.size();
    out.counters.candidates += candidates.size();
    out.counters.distance += depth;

    here.x2 = leg.end_state.x2;
    here.x1 = k + 1 == iterations ? finish : here.x1 + sensing_range;
  }
  out.plan.end_state = here;
  return out;
}

ContinuousStoppingOutcome run_receding_until_suboptimal(double lambda,
                                                        const RewardDistribution& dist,
                                                        double alpha, double sensing_range,
                                                        const ContinuousStoppingRule& rule,
                                                        std::uint64_t seed, std::uint64_t stream) {
  if (!(sensing_range > 0.0)) throw std::invalid_argument("sensing range must be > 0");
  if (!std::isfinite(rule.baseline)) {
    throw std::invalid_argument(
        "stopping rule needs a finite baseline; heavy-tailed rewards require an "
        "R*_2(S^1.1) style finite-horizon baseline");
  }
  const StripwiseField field(lambda, dist, seed, stream, sensing_range,
                             std::max(alpha * sensing_range, sensing_range));
  const double threshold = rule.baseline - rule.delta;
  ContinuousStoppingOutcome out;
  RobotState here{};
  while (out.distance + sensing_range <= rule.max_length) {
    const std::vector<Target> candidates = cone_candidates(field, here, sensing_range, alpha);
    const ContinuousPlan leg = best_chain(candidates, here, alpha, ChainSolver::DominanceSweep);
    ++out.iterations;
    out.distance += sensing_range;
    here = {here.x1 + sensing_range, leg.end_state.x2};
    field.evict_before(here.x1);
    if (leg.total_reward / sensing_range < threshold) return out;
  }
  out.capped = true;
  return out;
}

Estimate estimate_continuous_r_star(double lambda, const RewardDistribution& dist, double alpha,
                                    double length, std::uint32_t trials, std::uint64_t seed,
                                    unsigned parallelism, ChainSolver solver) {
  if (trials < 2) throw std::invalid_argument("estimate_continuous_r_star needs >= 2 trials");
  const auto samples = parallel_map(trials, parallelism, [&](std::size_t t) {
    const auto field =
        MarkedPointField::generate(lambda, reachable_cone(length, alpha), dist, seed, t);
    return optimal_plan(field, RobotState{}, length, alpha, solver).total_reward / length;
  });
  return estimate_mean(samples);
}

nlohmann::json plan_record(std::uint64_t seed, std::uint64_t stream, const nlohmann::json& params,
                           const ContinuousPlan& plan, const WorkloadCounters& counters) {
  nlohmann::json visited = nlohmann::json::array();
  for (const auto& t : plan.visited) visited.push_back({t.p1, t.p2, t.reward});
  return {{"seed", seed},
          {"stream", stream},
          {"params", params},
          {"total_reward", plan.total_reward},
          {"visited", visited},
          {"counters",
           {{"dp_relaxations", counters.dp_relaxations},
            {"planner_calls", counters.planner_calls},
            {"targets_visited", counters.targets_visited},
            {"candidates", counters.candidates},
            {"distance", counters.distance}}}};
}

}  // namespace mrm
