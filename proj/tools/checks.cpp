#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mrm/bayes.hpp"
#include "mrm/distribution.hpp"
#include "mrm/format.hpp"
#include "mrm/lattice.hpp"
#include "mrm/oracle.hpp"
#include "mrm/planning.hpp"
#include "sim.hpp"

namespace sim {
namespace {

using mrm::ExperimentFamily;
using mrm::FitModel;
using mrm::FitResult;

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

CheckLine within(const std::string& name, double value, double lo, double hi) {
  return {name, value >= lo && value <= hi, fmt("%.4f, want [%.4f, %.4f]", value, lo, hi)};
}

std::vector<CheckLine> sensing_checks(const mrm::RewardDistribution& dist,
                                      const std::vector<mrm::ExperimentRecord>& records) {
  if (dist.tail_class() == mrm::TailClass::LightTailed) {
    const FitResult semi = mrm::fit(records, FitModel::ExpGrowth);
    return {{"semi-log r^2", semi.r_squared >= 0.9, fmt("%.4f, want >= 0.9", semi.r_squared)}};
  }
  const FitResult lin = mrm::fit(records, FitModel::Linear);
  const FitResult semi = mrm::fit(records, FitModel::ExpGrowth);
  return {{"linear r^2", lin.r_squared >= 0.9, fmt("%.4f, want >= 0.9", lin.r_squared)},
          {"semi-log r^2 gap", semi.r_squared <= lin.r_squared - 0.05,
           fmt("%.4f below linear, want >= 0.05", lin.r_squared - semi.r_squared)}};
}

// Heavy-tailed growth exponent 2 / alpha - 1 of the mean reward rate.
std::optional<double> pareto_slope(const mrm::RewardDistribution& dist) {
  if (const auto* p = std::get_if<mrm::ParetoReward>(&dist.params())) {
    return 2.0 / p->tail_index - 1.0;
  }
  return std::nullopt;
}

}  // namespace

std::vector<CheckLine> assert_checks(const mrm::ExperimentSpec& spec,
                                     const std::vector<mrm::ExperimentRecord>& records) {
  const auto dist = mrm::RewardDistribution::parse(spec.dist);
  std::vector<CheckLine> out;
  switch (spec.family) {
    case ExperimentFamily::LatticeMeanReward: {
      if (const auto closed = mrm::r_star_closed_form(dist)) {
        const double last = records.back().mean;
        out.push_back(within("R* at n = " + mrm::format_double(records.back().sweep_value), last,
                             0.95 * *closed, 1.05 * *closed));
      } else if (const auto slope = pareto_slope(dist)) {
        const double e = mrm::fit(records, FitModel::PowerLaw).exponent_or_rate;
        out.push_back(within("log-log slope", e, *slope - 0.10, *slope + 0.10));
      }
      break;
    }
    case ExperimentFamily::LatticeSensing:
    case ExperimentFamily::ContinuousSensing:
      out = sensing_checks(dist, records);
      break;
    case ExperimentFamily::ContinuousMeanReward: {
      if (std::holds_alternative<mrm::ConstantReward>(dist.params())) {
        const double c = std::get<mrm::ConstantReward>(dist.params()).value;
        const double limit = c * std::sqrt(2.0 * spec.lambda * spec.alpha);
        out.push_back(within("T(L)/L at L = " + mrm::format_double(records.back().sweep_value),
                             records.back().mean, 0.90 * limit, 1.025 * limit));
      } else if (const auto slope = pareto_slope(dist)) {
        const double e = mrm::fit(records, FitModel::PowerLaw).exponent_or_rate;
        out.push_back(within("log-log slope", e, *slope - 0.15, *slope + 0.15));
      }
      break;
    }
    case ExperimentFamily::Agility:
      out.push_back(within("agility exponent",
                           mrm::fit(records, FitModel::PowerLaw).exponent_or_rate, 0.45, 0.55));
      break;
    case ExperimentFamily::Workload:
      for (const auto& w : mrm::workload_report(records)) {
        const bool visits = w.metric == "visits_per_distance";
        const bool over_alpha = records.front().sweep_name == "alpha";
        if (over_alpha && w.metric == "relaxations_per_call") continue;
        const double tol = visits ? 0.15 : over_alpha ? 0.4 : 0.5;
        out.push_back(within(w.metric + " exponent", w.fit.exponent_or_rate,
                             w.expected_exponent - tol, w.expected_exponent + tol));
      }
      break;
    case ExperimentFamily::Ugs: {
      // Records come as [homogeneous x 10, randomized x 10] per length.
      for (std::size_t base = 0; base + 20 <= records.size(); base += 20) {
        const auto& h = records[base + 9];
        const auto& r = records[base + 19];
        const std::string at = " at L = " + mrm::format_double(h.sweep_value);
        const double gap = r.extra.at("paired_gap").get<double>();
        const double se = r.extra.at("paired_gap_stderr").get<double>();
        out.push_back({"paired gap" + at, gap - 1.959964 * se > 0.0,
                       fmt("%.4f +- %.4f, want a positive 95%% lower bound", gap, se)});
        bool lower = true;
        for (int k = 0; k < 10; ++k) {
          lower = lower && records[base + 10 + k].metric("mean_posterior_variance") <
                               records[base + k].metric("mean_posterior_variance");
        }
        out.push_back({"randomized posterior variance lower" + at, lower,
                       lower ? "at every checkpoint" : "not at every checkpoint"});
        if (spec.lambda == 1.0 && spec.alpha == 1.0 && spec.mean_precision == 1.0) {
          out.push_back({"randomized gain" + at, r.mean >= 2.0, fmt("%.4f, want >= 2.0", r.mean)});
        }
      }
      break;
    }
  }
  return out;
}

std::vector<CheckLine> oracle_suites(std::uint64_t seed, std::uint32_t cases) {
  std::vector<CheckLine> out;
  auto exp1 = [](mrm::SeededRng& rng) { return -std::log1p(-rng.uniform()); };

  std::uint32_t bad = 0;
  for (std::uint32_t c = 0; c < cases; ++c) {
    mrm::SeededRng rng(seed, c);
    std::vector<double> r(36);
    for (double& x : r) x = c % 2 ? exp1(rng) : std::floor(10.0 * rng.uniform());
    const auto field = mrm::LatticeField::from_levels(7, r);
    const auto n = 1 + static_cast<std::uint32_t>(rng.uniform() * 8);
    bad += mrm::optimal_total_reward(field, n).total_reward !=
           mrm::oracle::enumerate_lattice_paths(field, n).total;
    const mrm::Vertex v{static_cast<std::uint32_t>(rng.uniform() * 4),
                        static_cast<std::uint32_t>(rng.uniform() * 4)};
    bad += mrm::optimal_reward_to_vertex(field, v) !=
           mrm::oracle::enumerate_paths_to_vertex(field, v);
    if (c % 2) {
      const auto m = 1 + static_cast<std::uint32_t>(rng.uniform() * 4);
      bad += mrm::iterative_plan(field, m, 8).per_leg_rewards !=
             mrm::oracle::enumerate_iterative_legs(field, m, 8);
    }
  }
  out.push_back({"lattice", bad == 0, fmt("%u mismatches over %u wedges", bad, cases)});

  bad = 0;
  const auto unit = mrm::RewardDistribution::exponential(1.0);
  for (std::uint32_t c = 0; c < cases; ++c) {
    mrm::SeededRng rng(seed + 1, c);
    const auto count = static_cast<std::size_t>(rng.uniform() * 13);
    std::vector<mrm::Target> targets;
    for (std::size_t i = 0; i < count; ++i) {
      targets.push_back({10.0 * (1.0 - rng.uniform()), 6.0 * (2.0 * rng.uniform() - 1.0),
                         c % 2 ? exp1(rng) : std::floor(5.0 * rng.uniform())});
    }
    std::sort(targets.begin(), targets.end(),
              [](const mrm::Target& a, const mrm::Target& b) { return a.p1 < b.p1; });
    targets.erase(std::unique(targets.begin(), targets.end(),
                              [](const auto& a, const auto& b) { return a.p1 == b.p1; }),
                  targets.end());
    const auto field =
        mrm::MarkedPointField::from_targets(targets, 1.0, mrm::StripRegion{10.0, 6.0}, unit);
    const double alpha = 0.25 + 2.0 * rng.uniform();
    const double brute = mrm::oracle::enumerate_chains(targets, {}, 10.0, alpha).total;
    for (auto solver : {mrm::ChainSolver::PairScan, mrm::ChainSolver::DominanceSweep}) {
      bad += mrm::optimal_plan(field, {}, 10.0, alpha, solver).total_reward != brute;
    }
    const double s = 1.0 + 6.0 * rng.uniform();
    bad += mrm::receding_horizon_plan(field, {}, 10.0, s, alpha).per_iteration !=
           mrm::oracle::enumerate_receding(targets, {}, 10.0, s, alpha);
  }
  out.push_back({"continuous", bad == 0, fmt("%u mismatches over %u fields", bad, cases)});

  double worst = 0.0;
  const std::uint32_t bayes_cases = std::max<std::uint32_t>(1, cases / 10);
  for (std::uint32_t c = 0; c < bayes_cases; ++c) {
    mrm::SeededRng rng(seed + 2, c);
    const mrm::GaussianBelief prior{4.0 * rng.normal(), 0.2 + 3.0 * rng.uniform()};
    std::vector<mrm::Measurement> ms(1 + static_cast<std::size_t>(rng.uniform() * 6));
    mrm::GaussianBelief exact = prior;
    for (auto& m : ms) {
      m = {prior.mean + 2.0 * rng.normal(), 0.1 + 4.0 * rng.uniform()};
      exact = mrm::update(exact, m);
    }
    const auto grid = mrm::oracle::grid_posterior(prior, ms);
    worst = std::max({worst, std::abs(grid.precision - exact.precision) / exact.precision,
                      std::abs(grid.mean - exact.mean) / std::max(1.0, std::abs(exact.mean))});
  }
  out.push_back({"bayes", worst <= 1e-6,
                 fmt("worst relative deviation %.2e over %u cases, want <= 1e-6", worst,
                     bayes_cases)});
  return out;
}

}  // namespace sim
