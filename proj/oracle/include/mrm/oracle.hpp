#pragma once

// Brute-force reference implementations used only by tests and
// `sim oracle-check`. None of them share code with the planners they check.
// Every enumerator sums rewards front to back, the same association the
// dynamic programs use, so integer-valued and real-valued fields compare
// bit for bit. Ties between distinct optima are broken by enumeration
// order; callers comparing argmax paths should use continuous rewards.

#include <cstdint>
#include <vector>

#include "mrm/bayes.hpp"
#include "mrm/lattice.hpp"
#include "mrm/planning.hpp"

namespace mrm::oracle {

struct LatticeBest {
  double total = 0.0;
  std::vector<Vertex> path;
  std::uint64_t paths_examined = 0;
};

/// All 2^(n-1) monotone paths from the origin crossing n vertices.
LatticeBest enumerate_lattice_paths(const LatticeField& field, std::uint32_t n);

/// All C(v1 + v2, v1) monotone paths from the origin to v.
double enumerate_paths_to_vertex(const LatticeField& field, Vertex v);

/// Limited-sensing composition, each leg solved by enumeration: leg 1
/// collects m vertices from the origin, later legs m vertices beyond the
/// previous leg's end.
std::vector<double> enumerate_iterative_legs(const LatticeField& field, std::uint32_t m,
                                             std::uint32_t n);

struct ChainBest {
  double total = 0.0;
  std::vector<Target> chain;
  std::uint64_t subsets_examined = 0;
};

/// Every subset of `targets` with p1 in (start.x1, start.x1 + horizon],
/// kept when, taken in p1 order, each element is cone-reachable from the
/// previous one (the first from `start`). At most 20 targets.
ChainBest enumerate_chains(const std::vector<Target>& targets, const RobotState& start,
                           double horizon, double alpha);

/// Receding-horizon composition with each strip solved by enumerate_chains.
/// The lateral state after a strip is the last chosen p2.
std::vector<double> enumerate_receding(const std::vector<Target>& targets,
                                       const RobotState& start, double length,
                                       double sensing_range, double alpha);

/// Posterior mean and precision of theta under a Gaussian prior and
/// Gaussian likelihoods, by composite Simpson integration of
/// prior x likelihood on a uniform grid.
GaussianBelief grid_posterior(const GaussianBelief& prior,
                              const std::vector<Measurement>& measurements,
                              std::size_t intervals = 200'000);

}  // namespace mrm::oracle
