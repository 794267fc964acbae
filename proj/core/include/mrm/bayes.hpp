#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrm/planning.hpp"
#include "mrm/rng.hpp"

namespace mrm {

/// Gaussian belief N(mean, 1 / precision) over the unknown theta.
struct GaussianBelief {
  double mean = 0.0;
  double precision = 1.0;

  double variance() const { return 1.0 / precision; }
};

/// Observation y ~ N(theta, 1 / precision).
struct Measurement {
  double value = 0.0;
  double precision = 1.0;
};

/// Conjugate update: precisions add, the mean is precision-weighted.
/// Throws std::invalid_argument unless both precisions are positive.
GaussianBelief update(const GaussianBelief& belief, const Measurement& m);

struct MissionEstimate {
  std::vector<GaussianBelief> trajectory;  // prior first, then after each visit
  double final_variance = 0.0;
};

/// Treats each visited target's reward as a measurement precision, draws
/// y_i ~ N(theta_true, 1 / beta_i) in visiting order and folds the updates.
/// Zero-precision visits carry no information and are skipped.
MissionEstimate simulate_mission_estimation(const ContinuousPlan& plan, double theta_true,
                                            const GaussianBelief& prior, SeededRng& rng);

/// Sensor deployment compared in the UGS study.
enum class UgsStrategy { Homogeneous, Randomized };

std::string_view to_string(UgsStrategy s);

struct UgsCheckpoint {
  double distance = 0.0;
  Estimate gain_per_distance;  // collected precision / distance
  double mean_posterior_variance = 0.0;
};

struct UgsStrategySummary {
  UgsStrategy strategy = UgsStrategy::Homogeneous;
  std::vector<UgsCheckpoint> checkpoints;  // L/10, 2L/10, ..., L
};

struct UgsComparison {
  double lambda = 0.0;
  double alpha = 0.0;
  double length = 0.0;
  double mean_precision = 0.0;
  double prior_precision = 1.0;
  std::uint32_t trials = 0;
  UgsStrategySummary homogeneous;
  UgsStrategySummary randomized;
  /// Paired per-trial difference randomized - homogeneous of gain / L.
  Estimate paired_gap;
};

/// Plans each trial's field twice on common target positions: once with
/// Constant(mean_precision) marks and once with Exponential(mean
/// mean_precision) marks. Throws std::invalid_argument unless
/// mean_precision > 0 and trials >= 2.
UgsComparison compare_ugs_strategies(double lambda, double mean_precision, double length,
                                     double alpha, std::uint32_t trials, std::uint64_t seed,
                                     unsigned parallelism = 1, double prior_precision = 1.0);

/// `strategy,L,lambda,alpha,mean_gain,stderr_gain,mean_posterior_variance`,
/// one row per strategy and checkpoint.
void write_ugs_csv(std::ostream& out, const UgsComparison& cmp);

}  // namespace mrm
