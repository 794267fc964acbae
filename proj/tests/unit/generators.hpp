#pragma once

// Hand-rolled generators for property tests. Each case is a pure function
// of (seed, case index), so a failing case is reproduced by its index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mrm/lattice.hpp"
#include "mrm/poisson_field.hpp"
#include "mrm/rng.hpp"

namespace mrm::testing {

inline std::uint32_t uniform_int(SeededRng& rng, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(rng.uniform() * (hi - lo + 1));
}

/// Wedge with levels 0..horizon. Integer rewards in [0, 9] make ties common
/// and sums exact; otherwise rewards are Exponential(1).
inline LatticeField random_wedge(SeededRng& rng, std::uint32_t horizon, bool integer_rewards) {
  std::vector<double> r((std::size_t{horizon} + 1) * (horizon + 2) / 2);
  for (double& x : r) {
    x = integer_rewards ? std::floor(rng.uniform() * 10.0) : -std::log1p(-rng.uniform());
  }
  return LatticeField::from_levels(horizon, std::move(r));
}

/// Up to `max_targets` targets in [0, depth] x [-width, width], distinct p1.
inline std::vector<Target> random_targets(SeededRng& rng, std::size_t max_targets, double depth,
                                          double width, bool integer_rewards) {
  const auto count = uniform_int(rng, 0, static_cast<std::uint32_t>(max_targets));
  std::vector<Target> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const double p1 = depth * (1.0 - rng.uniform());  // (0, depth]
    const double p2 = width * (2.0 * rng.uniform() - 1.0);
    const double reward =
        integer_rewards ? std::floor(rng.uniform() * 5.0) : -std::log1p(-rng.uniform());
    out.push_back({p1, p2, reward});
  }
  std::sort(out.begin(), out.end(), [](const Target& a, const Target& b) { return a.p1 < b.p1; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Target& a, const Target& b) { return a.p1 == b.p1; }),
            out.end());
  return out;
}

}  // namespace mrm::testing
