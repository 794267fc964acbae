#include "mrm/bayes.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mrm/format.hpp"
#include "mrm/parallel.hpp"

namespace mrm {

GaussianBelief update(const GaussianBelief& belief, const Measurement& m) {
  if (!(belief.precision > 0.0) || !(m.precision > 0.0)) {
    throw std::invalid_argument("belief and measurement precisions must be > 0");
  }
  const double precision = belief.precision + m.precision;
  const double mean = (belief.precision * belief.mean + m.precision * m.value) / precision;
  return {mean, precision};
}

MissionEstimate simulate_mission_estimation(const ContinuousPlan& plan, double theta_true,
                                            const GaussianBelief& prior, SeededRng& rng) {
  MissionEstimate out;
  out.trajectory.reserve(plan.visited.size() + 1);
  out.trajectory.push_back(prior);
  GaussianBelief belief = prior;
  for (const auto& target : plan.visited) {
    if (!(target.reward > 0.0)) continue;
    const double y = theta_true + rng.normal() / std::sqrt(target.reward);
    belief = update(belief, {y, target.reward});
    out.trajectory.push_back(belief);
  }
  out.final_variance = belief.variance();
  return out;
}

std::string_view to_string(UgsStrategy s) {
  return s == UgsStrategy::Homogeneous ? "homogeneous" : "randomized";
}

namespace {

constexpr int kCheckpoints = 10;

struct TrialCurve {
  std::array<double, kCheckpoints> collected{};  // precision gathered up to each checkpoint
};

TrialCurve collect(const ContinuousPlan& plan, double length) {
  TrialCurve c;
  std::size_t next = 0;
  double sum = 0.0;
  for (int k = 0; k < kCheckpoints; ++k) {
    const double limit = length * (k + 1) / kCheckpoints;
    while (next < plan.visited.size() && plan.visited[next].p1 <= limit) {
      sum += plan.visited[next].reward;
      ++next;
    }
    c.collected[k] = sum;
  }
  return c;
}

UgsStrategySummary summarize(UgsStrategy strategy, const std::vector<TrialCurve>& curves,
                             double length, double prior_precision) {
  UgsStrategySummary s;
  s.strategy = strategy;
  for (int k = 0; k < kCheckpoints; ++k) {
    const double distance = length * (k + 1) / kCheckpoints;
    std::vector<double> gain(curves.size());
    double variance_sum = 0.0;
    for (std::size_t t = 0; t < curves.size(); ++t) {
      gain[t] = curves[t].collected[k] / distance;
      variance_sum += 1.0 / (prior_precision + curves[t].collected[k]);
    }
    s.checkpoints.push_back(
        {distance, estimate_mean(gain), variance_sum / static_cast<double>(curves.size())});
  }
  return s;
}

}  // namespace

UgsComparison compare_ugs_strategies(double lambda, double mean_precision, double length,
                                     double alpha, std::uint32_t trials, std::uint64_t seed,
                                     unsigned parallelism, double prior_precision) {
  if (!(mean_precision > 0.0)) throw std::invalid_argument("mean precision must be > 0");
  if (trials < 2) throw std::invalid_argument("UGS comparison needs >= 2 trials");
  if (!(prior_precision > 0.0)) throw std::invalid_argument("prior precision must be > 0");

  const auto homogeneous = RewardDistribution::constant(mean_precision);
  const auto randomized = RewardDistribution::exponential(1.0 / mean_precision);
  const Region cone = reachable_cone(length, alpha);

  struct Pair {
    TrialCurve homogeneous;
    TrialCurve randomized;
  };
  const auto pairs = parallel_map(trials, parallelism, [&](std::size_t t) {
    Pair p;
    for (const auto* dist : {&homogeneous, &randomized}) {
      const auto field = MarkedPointField::generate(lambda, cone, *dist, seed, t);
      const auto plan =
          optimal_plan(field, RobotState{}, length, alpha, ChainSolver::DominanceSweep);
      (dist == &homogeneous ? p.homogeneous : p.randomized) = collect(plan, length);
    }
    return p;
  });

  std::vector<TrialCurve> h, r;
  std::vector<double> gap;
  for (const auto& p : pairs) {
    h.push_back(p.homogeneous);
    r.push_back(p.randomized);
    gap.push_back((p.randomized.collected.back() - p.homogeneous.collected.back()) / length);
  }
  UgsComparison cmp;
  cmp.lambda = lambda;
  cmp.alpha = alpha;
  cmp.length = length;
  cmp.mean_precision = mean_precision;
  cmp.prior_precision = prior_precision;
  cmp.trials = trials;
  cmp.homogeneous = summarize(UgsStrategy::Homogeneous, h, length, prior_precision);
  cmp.randomized = summarize(UgsStrategy::Randomized, r, length, prior_precision);
  cmp.paired_gap = estimate_mean(gap);
  return cmp;
}

void write_ugs_csv(std::ostream& out, const UgsComparison& cmp) {
  out << "strategy,L,lambda,alpha,mean_gain,stderr_gain,mean_posterior_variance\n";
  for (const auto* s : {&cmp.homogeneous, &cmp.randomized}) {
    for (const auto& c : s->checkpoints) {
      out << to_string(s->strategy) << ',' << format_double(c.distance) << ','
          << format_double(cmp.lambda) << ',' << format_double(cmp.alpha) << ','
          << format_double(c.gain_per_distance.mean) << ','
          << format_double(c.gain_per_distance.std_err) << ','
          << format_double(c.mean_posterior_variance) << '\n';
    }
  }
}

}  // namespace mrm
