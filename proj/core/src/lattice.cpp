#include "mrm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mrm/parallel.hpp"

namespace mrm {

namespace {

struct WedgeOutcome {
  double best = 0.0;
  std::uint32_t best_offset = 0;  // v1 offset of the argmax vertex on the last level
  std::vector<std::uint8_t> from_e1;  // per wedge vertex, only when tracking paths
  std::uint64_t relaxations = 0;
};

std::size_t tri(std::size_t level) { return level * (level + 1) / 2; }

/// Level-synchronous DP over the wedge rooted at `root` with `steps` levels
/// below it. value(v) = r(v) + max(value(v - e1), value(v - e2)).
template <class Rewards>
WedgeOutcome wedge_dp(const Rewards& rewards, Vertex root, std::uint32_t steps,
                      bool include_root, bool track_path) {
  WedgeOutcome out;
  std::vector<double> value(std::size_t{steps} + 1, 0.0);
  value[0] = include_root ? rewards(root.v1, root.v2) : 0.0;
  if (track_path) out.from_e1.assign(tri(std::size_t{steps} + 1), 0);

  for (std::uint32_t k = 1; k <= steps; ++k) {
    const std::size_t base = tri(k);
    // Descending offsets keep value[a - 1] and value[a] at level k - 1.
    value[k] = rewards(root.v1 + k, root.v2) + value[k - 1];
    if (track_path) out.from_e1[base + k] = 1;
    for (std::uint32_t a = k - 1; a >= 1; --a) {
      const double via_e1 = value[a - 1];
      const double via_e2 = value[a];
      const bool take_e1 = via_e1 >= via_e2;
      value[a] = rewards(root.v1 + a, root.v2 + (k - a)) + (take_e1 ? via_e1 : via_e2);
      if (track_path) out.from_e1[base + a] = take_e1 ? 1 : 0;
    }
    value[0] = rewards(root.v1, root.v2 + k) + value[0];
    out.relaxations += 2ULL * k;
  }

  // Argmax on the last level; scanning from the largest v1 offset keeps the
  // v1-first preference for ties.
  std::uint32_t best_a = steps;
  for (std::uint32_t a = steps; a-- > 0;) {
    if (value[a] > value[best_a]) best_a = a;
  }
  out.best = value[best_a];
  out.best_offset = best_a;
  return out;
}

std::vector<Vertex> trace_path(const WedgeOutcome& dp, Vertex root, std::uint32_t steps) {
  std::vector<Vertex> path(std::size_t{steps} + 1);
  std::uint32_t a = dp.best_offset;
  for (std::uint32_t k = steps;; --k) {
    path[k] = Vertex{root.v1 + a, root.v2 + (k - a)};
    if (k == 0) break;
    if (dp.from_e1[tri(k) + a]) --a;
  }
  return path;
}

template <class Rewards>
double point_to_point(const Rewards& rewards, Vertex v) {
  std::vector<double> row(std::size_t{v.v2} + 1);
  for (std::uint32_t i = 0; i <= v.v1; ++i) {
    for (std::uint32_t j = 0; j <= v.v2; ++j) {
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else if (i == 0) {
        best = row[j - 1];
      } else if (j == 0) {
        best = row[j];
      } else {
        best = std::max(row[j], row[j - 1]);
      }
      row[j] = rewards(i, j) + best;
    }
  }
  return row[v.v2];
}

void check_vertices(const LatticeField& field, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("a lattice path crosses at least one vertex");
  if (n - 1 > field.horizon()) {
    throw std::out_of_range("a path of " + std::to_string(n) +
                            " vertices leaves a wedge of horizon " +
                            std::to_string(field.horizon()));
  }
}

}  // namespace

LatticeField LatticeField::generate(const RewardDistribution& dist, std::uint32_t horizon,
                                    std::uint64_t seed, std::uint64_t stream) {
  LatticeField f;
  f.horizon_ = horizon;
  f.dist_ = dist;
  f.seed_ = seed;
  f.stream_ = stream;
  f.rewards_.resize(tri(std::size_t{horizon} + 1));
  const LazyLatticeRewards source(dist, seed, stream);
  for (std::uint32_t level = 0; level <= horizon; ++level) {
    for (std::uint32_t v1 = 0; v1 <= level; ++v1) {
      f.rewards_[index(v1, level - v1)] = source(v1, level - v1);
    }
  }
  return f;
}

LatticeField LatticeField::from_levels(std::uint32_t horizon, std::vector<double> rewards) {
  if (rewards.size() != tri(std::size_t{horizon} + 1)) {
    throw std::invalid_argument("lattice wedge of horizon " + std::to_string(horizon) +
                                " needs " + std::to_string(tri(std::size_t{horizon} + 1)) +
                                " rewards, got " + std::to_string(rewards.size()));
  }
  LatticeField f;
  f.horizon_ = horizon;
  f.rewards_ = std::move(rewards);
  return f;
}

double LatticeField::reward(Vertex v) const {
  if (!contains(v)) {
    throw std::out_of_range("vertex (" + std::to_string(v.v1) + "," + std::to_string(v.v2) +
                            ") is outside the wedge");
  }
  return (*this)(v.v1, v.v2);
}

LatticePath optimal_total_reward(const LatticeField& field, std::uint32_t n) {
  check_vertices(field, n);
  const WedgeOutcome dp = wedge_dp(field, Vertex{}, n - 1, true, true);
  return LatticePath{dp.best, trace_path(dp, Vertex{}, n - 1), dp.relaxations};
}

double optimal_reward_to_vertex(const LatticeField& field, Vertex v) {
  if (!field.contains(v)) {
    throw std::out_of_range("vertex (" + std::to_string(v.v1) + "," + std::to_string(v.v2) +
                            ") is outside the wedge");
  }
  return point_to_point(field, v);
}

double optimal_reward_to_vertex(const LazyLatticeRewards& rewards, Vertex v) {
  return point_to_point(rewards, v);
}

std::vector<double> optimal_totals_at(const LazyLatticeRewards& rewards,
                                      const std::vector<std::uint32_t>& ns) {
  if (!std::is_sorted(ns.begin(), ns.end())) {
    throw std::invalid_argument("optimal_totals_at: path lengths must be ascending");
  }
  std::vector<double> out;
  out.reserve(ns.size());
  if (ns.empty()) return out;
  if (ns.front() == 0) throw std::invalid_argument("a lattice path crosses at least one vertex");
  const std::uint32_t horizon = ns.back() - 1;
  std::vector<double> value(std::size_t{horizon} + 1, 0.0);
  std::vector<double> row;
  rewards.fill_level(0, row);
  value[0] = row[0];
  std::size_t next = 0;
  auto record = [&](std::uint32_t k) {
    while (next < ns.size() && ns[next] == k + 1) {
      out.push_back(*std::max_element(value.begin(), value.begin() + k + 1));
      ++next;
    }
  };
  record(0);
  for (std::uint32_t k = 1; k <= horizon; ++k) {
    rewards.fill_level(k, row);
    value[k] = row[k] + value[k - 1];
    for (std::uint32_t a = k - 1; a >= 1; --a) {
      value[a] = row[a] + std::max(value[a - 1], value[a]);
    }
    value[0] = row[0] + value[0];
    record(k);
  }
  return out;
}

std::optional<double> shape_function_closed_form(const RewardDistribution& dist, double v1,
                                                 double v2) {
  if (v1 < 0.0 || v2 < 0.0) return std::nullopt;
  if (const auto* e = std::get_if<ExponentialReward>(&dist.params())) {
    const double s = std::sqrt(v1) + std::sqrt(v2);
    return s * s / e->rate;
  }
  if (const auto* g = std::get_if<GeometricReward>(&dist.params())) {
    return (v1 + 2.0 * std::sqrt(v1 * v2 * (1.0 - g->p)) + v2) / g->p;
  }
  return std::nullopt;
}

std::optional<double> r_star_closed_form(const RewardDistribution& dist) {
  if (std::holds_alternative<ExponentialReward>(dist.params()) ||
      std::holds_alternative<GeometricReward>(dist.params())) {
    const Moments m = dist.moments();
    return m.mean + m.std_dev;
  }
  return std::nullopt;
}

LatticePlanResult iterative_plan(const LatticeField& field, std::uint32_t sensing_range,
                                 std::uint32_t n) {
  if (sensing_range == 0) throw std::invalid_argument("sensing range must be >= 1");
  if (sensing_range > n) {
    throw std::invalid_argument("sensing range exceeds the path length");
  }
  check_vertices(field, n);

  LatticePlanResult result;
  Vertex here{};
  std::uint32_t collected = 0;
  while (collected < n) {
    const std::uint32_t leg = std::min(sensing_range, n - collected);
    // The first leg collects the origin itself, so it needs one step less.
    const bool first = collected == 0;
    const std::uint32_t steps = first ? leg - 1 : leg;
    const WedgeOutcome dp = wedge_dp(field, here, steps, first, true);
    here = trace_path(dp, here, steps).back();
    result.per_leg_rewards.push_back(dp.best);
    result.total_reward += dp.best;
    result.relaxation_count += dp.relaxations;
    ++result.legs;
    collected += leg;
  }
  result.end_vertex = here;
  return result;
}

StoppingOutcome run_until_suboptimal(const RewardDistribution& dist, std::uint32_t m,
                                     const StoppingRule& rule, std::uint64_t seed,
                                     std::uint64_t stream) {
  if (m == 0) throw std::invalid_argument("sensing range must be >= 1");
  if (!std::isfinite(rule.baseline)) {
    throw std::invalid_argument(
        "stopping rule needs a finite baseline; heavy-tailed rewards require an "
        "R*_2(m^1.1) style finite-horizon baseline");
  }
  const LazyLatticeRewards rewards(dist, seed, stream);
  const double threshold = rule.baseline - rule.delta;
  StoppingOutcome out;
  Vertex here{};
  while (out.distance + m <= rule.max_steps) {
    const bool first = out.legs == 0;
    const std::uint32_t steps = first ? m - 1 : m;
    const WedgeOutcome dp = wedge_dp(rewards, here, steps, first, true);
    here = trace_path(dp, here, steps).back();
    ++out.legs;
    out.distance += m;
    if (dp.best / static_cast<double>(m) < threshold) return out;
  }
  out.distance = rule.max_steps;
  out.capped = true;
  return out;
}

Estimate estimate_r_star(const RewardDistribution& dist, std::uint32_t n, std::uint32_t trials,
                         std::uint64_t seed, unsigned parallelism) {
  if (trials < 2) throw std::invalid_argument("estimate_r_star needs at least 2 trials");
  if (n == 0) throw std::invalid_argument("estimate_r_star needs n >= 1");
  const std::vector<std::uint32_t> ns{n};
  const auto samples = parallel_map(trials, parallelism, [&](std::size_t t) {
    return optimal_totals_at(LazyLatticeRewards(dist, seed, t), ns).front() /
           static_cast<double>(n);
  });
  return estimate_mean(samples);
}

}  // namespace mrm
