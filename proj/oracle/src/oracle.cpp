#include "mrm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace mrm::oracle {

namespace {

// Walks the path encoded by `mask` (bit k set: step k goes in v1) from root.
template <class Visit>
void walk(Vertex root, std::uint32_t steps, std::uint64_t mask, Visit&& visit) {
  Vertex v = root;
  for (std::uint32_t k = 0; k < steps; ++k) {
    if (mask >> k & 1U) {
      ++v.v1;
    } else {
      ++v.v2;
    }
    visit(v);
  }
}

struct Leg {
  double total = 0.0;
  Vertex end;
};

Leg best_leg(const LatticeField& field, Vertex root, std::uint32_t steps, bool include_root) {
  if (steps > 40) throw std::invalid_argument("path enumeration limited to 40 steps");
  Leg best{-1.0, root};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << steps); ++mask) {
    double sum = include_root ? field(root.v1, root.v2) : 0.0;
    Vertex end = root;
    walk(root, steps, mask, [&](Vertex v) {
      sum += field(v.v1, v.v2);
      end = v;
    });
    if (sum > best.total) best = {sum, end};
  }
  return best;
}

}  // namespace

LatticeBest enumerate_lattice_paths(const LatticeField& field, std::uint32_t n) {
  if (n == 0 || n - 1 > field.horizon()) throw std::out_of_range("path leaves the wedge");
  if (n > 25) throw std::invalid_argument("path enumeration limited to n <= 25");
  const std::uint32_t steps = n - 1;
  LatticeBest best;
  best.total = -1.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << steps); ++mask) {
    std::vector<Vertex> path{Vertex{}};
    double sum = field(0, 0);
    walk(Vertex{}, steps, mask, [&](Vertex v) {
      sum += field(v.v1, v.v2);
      path.push_back(v);
    });
    ++best.paths_examined;
    if (sum > best.total) {
      best.total = sum;
      best.path = std::move(path);
    }
  }
  return best;
}

double enumerate_paths_to_vertex(const LatticeField& field, Vertex v) {
  if (!field.contains(v)) throw std::out_of_range("vertex outside the wedge");
  const std::uint32_t steps = v.v1 + v.v2;
  if (steps > 25) throw std::invalid_argument("path enumeration limited to 25 steps");
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << steps); ++mask) {
    if (static_cast<std::uint32_t>(std::popcount(mask)) != v.v1) continue;
    double sum = field(0, 0);
    walk(Vertex{}, steps, mask, [&](Vertex u) { sum += field(u.v1, u.v2); });
    best = std::max(best, sum);
  }
  return best;
}

std::vector<double> enumerate_iterative_legs(const LatticeField& field, std::uint32_t m,
                                             std::uint32_t n) {
  if (m == 0 || m > n) throw std::invalid_argument("need 1 <= m <= n");
  std::vector<double> legs;
  Vertex here{};
  std::uint32_t collected = 0;
  while (collected < n) {
    const std::uint32_t take = std::min(m, n - collected);
    const bool first = collected == 0;
    const Leg leg = best_leg(field, here, first ? take - 1 : take, first);
    legs.push_back(leg.total);
    here = leg.end;
    collected += take;
  }
  return legs;
}

ChainBest enumerate_chains(const std::vector<Target>& targets, const RobotState& start,
                           double horizon, double alpha) {
  std::vector<Target> pool;
  for (const auto& t : targets) {
    if (t.p1 > start.x1 && t.p1 <= start.x1 + horizon) pool.push_back(t);
  }
  if (pool.size() > 20) throw std::invalid_argument("chain enumeration limited to 20 targets");
  std::sort(pool.begin(), pool.end(), [](const Target& a, const Target& b) { return a.p1 < b.p1; });

  ChainBest best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size()); ++mask) {
    ++best.subsets_examined;
    double x1 = start.x1;
    double x2 = start.x2;
    double sum = 0.0;
    bool feasible = true;
    std::vector<Target> chain;
    for (std::size_t i = 0; i < pool.size() && feasible; ++i) {
      if (!(mask >> i & 1U)) continue;
      const Target& t = pool[i];
      feasible = t.p1 > x1 && std::fabs(t.p2 - x2) <= alpha * (t.p1 - x1);
      x1 = t.p1;
      x2 = t.p2;
      sum += t.reward;
      chain.push_back(t);
    }
    if (feasible && sum > best.total) {
      best.total = sum;
      best.chain = std::move(chain);
    }
  }
  return best;
}

std::vector<double> enumerate_receding(const std::vector<Target>& targets,
                                       const RobotState& start, double length,
                                       double sensing_range, double alpha) {
  std::vector<double> out;
  const auto iterations = static_cast<std::size_t>(std::ceil(length / sensing_range));
  RobotState here = start;
  const double finish = start.x1 + length;
  for (std::size_t k = 0; k < iterations; ++k) {
    const double depth = std::min(sensing_range, finish - here.x1);
    const ChainBest strip = enumerate_chains(targets, here, depth, alpha);
    out.push_back(strip.total);
    if (!strip.chain.empty()) here.x2 = strip.chain.back().p2;
    here.x1 = k + 1 == iterations ? finish : here.x1 + sensing_range;
  }
  return out;
}

GaussianBelief grid_posterior(const GaussianBelief& prior,
                              const std::vector<Measurement>& measurements,
                              std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  // The posterior sits between the prior and the data; cover both widely.
  double lo = prior.mean - 12.0 / std::sqrt(prior.precision);
  double hi = prior.mean + 12.0 / std::sqrt(prior.precision);
  for (const auto& m : measurements) {
    lo = std::min(lo, m.value - 12.0 / std::sqrt(m.precision));
    hi = std::max(hi, m.value + 12.0 / std::sqrt(m.precision));
  }
  auto log_density = [&](double theta) {
    double s = -0.5 * prior.precision * (theta - prior.mean) * (theta - prior.mean);
    for (const auto& m : measurements) {
      s -= 0.5 * m.precision * (theta - m.value) * (theta - m.value);
    }
    return s;
  };
  // Normalize by the peak before exponentiating to avoid underflow.
  const double h = (hi - lo) / static_cast<double>(intervals);
  double peak = -INFINITY;
  for (std::size_t i = 0; i <= intervals; ++i) peak = std::max(peak, log_density(lo + h * i));
  auto weight = [&](std::size_t i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    return w * std::exp(log_density(lo + h * static_cast<double>(i)) - peak);
  };
  double z = 0.0, first = 0.0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double p = weight(i);
    z += p;
    first += p * (lo + h * static_cast<double>(i));
  }
  const double mean = first / z;
  double second = 0.0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double d = lo + h * static_cast<double>(i) - mean;
    second += weight(i) * d * d;
  }
  const double variance = second / z;
  return {mean, 1.0 / variance};
}

}  // namespace mrm::oracle
