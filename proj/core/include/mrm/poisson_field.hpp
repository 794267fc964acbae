#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <variant>
#include <vector>

#include "mrm/distribution.hpp"

namespace mrm {

/// Longitudinal speed v, maximum lateral speed w and sensing depth S.
/// Agility alpha = w / v is the half-slope of the reachable cone.
class RobotConfig {
 public:
  /// Throws std::invalid_argument unless v, w and S are positive.
  RobotConfig(double speed, double lateral_speed, double sensing_range);

  double speed() const noexcept { return speed_; }
  double lateral_speed() const noexcept { return lateral_speed_; }
  double sensing_range() const noexcept { return sensing_range_; }
  double agility() const noexcept { return lateral_speed_ / speed_; }

 private:
  double speed_;
  double lateral_speed_;
  double sensing_range_;
};

struct Target {
  double p1 = 0.0;  // longitudinal position
  double p2 = 0.0;  // lateral position
  double reward = 0.0;
  bool operator==(const Target&) const = default;
};

/// {0 <= p1 <= length, |p2 - apex_p2| <= slope * p1}.
struct ConeRegion {
  double length = 0.0;
  double slope = 1.0;
  double apex_p2 = 0.0;
  bool operator==(const ConeRegion&) const = default;
};

/// {0 <= p1 <= length, |p2| <= half_width}.
struct StripRegion {
  double length = 0.0;
  double half_width = 0.0;
  bool operator==(const StripRegion&) const = default;
};

using Region = std::variant<ConeRegion, StripRegion>;

/// Closed-form area of a region.
double area(const Region& region) noexcept;
bool contains(const Region& region, double p1, double p2) noexcept;

/// Random access to targets inside an axis-aligned window; p1 in the
/// half-open range (p1_lo, p1_hi], p2 in the closed range [p2_lo, p2_hi].
/// Results are sorted by p1.
class TargetSource {
 public:
  virtual ~TargetSource() = default;
  virtual std::vector<Target> targets_in(double p1_lo, double p1_hi, double p2_lo,
                                         double p2_hi) const = 0;
};

/// Homogeneous marked Poisson point process restricted to a region, with
/// targets sorted by strictly increasing p1.
class MarkedPointField final : public TargetSource {
 public:
  /// Draws N ~ Poisson(lambda * area), N uniform positions and N i.i.d.
  /// marks. Positions and marks use separate sub-streams of (seed, stream),
  /// so two fields that differ only in `dist` share target positions.
  /// Throws std::invalid_argument unless lambda > 0 and the area is finite.
  static MarkedPointField generate(double lambda, const Region& region,
                                   const RewardDistribution& dist, std::uint64_t seed,
                                   std::uint64_t stream = 0);

  /// Wraps explicit targets (sorted on construction). Throws
  /// std::invalid_argument on duplicate p1 or negative rewards.
  static MarkedPointField from_targets(std::vector<Target> targets, double lambda,
                                       const Region& region, const RewardDistribution& dist,
                                       std::uint64_t seed = 0, std::uint64_t stream = 0);

  double lambda() const noexcept { return lambda_; }
  const Region& region() const noexcept { return region_; }
  const RewardDistribution& distribution() const noexcept { return dist_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  const std::vector<Target>& targets() const noexcept { return targets_; }
  std::size_t size() const noexcept { return targets_.size(); }
  /// Number of positions re-drawn to break floating-point p1 collisions.
  std::uint64_t p1_redraws() const noexcept { return redraws_; }

  std::vector<Target> targets_in(double p1_lo, double p1_hi, double p2_lo,
                                 double p2_hi) const override;

 private:
  MarkedPointField(double lambda, Region region, RewardDistribution dist)
      : lambda_(lambda), region_(region), dist_(dist) {}

  double lambda_;
  Region region_;
  RewardDistribution dist_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t redraws_ = 0;
  std::vector<Target> targets_;
};

/// Linear map (p1, p2) -> (p1, p2 / alpha). The image is a Poisson field of
/// intensity alpha * lambda on the transformed region; rewards are kept.
/// Throws std::invalid_argument unless alpha > 0.
MarkedPointField agility_transform(const MarkedPointField& field, double alpha);

inline constexpr double kUnlimitedSensing = std::numeric_limits<double>::infinity();

/// Targets with x1 <= p1 <= x1 + sensing_range over the full lateral
/// extent, in p1 order. Pass kUnlimitedSensing for no depth limit.
std::vector<Target> visible_targets(const MarkedPointField& field, double x1,
                                    double sensing_range);

/// Poisson field on the whole plane generated lazily in rectangular cells
/// of size cell_depth x cell_width. Cell (i, j) is drawn from its own keyed
/// stream, so revisiting a cell reproduces identical targets and the field
/// never needs to be materialized beyond what a planner looks at.
/// Concurrent queries of one cell observe a single generation event.
class StripwiseField final : public TargetSource {
 public:
  /// Throws std::invalid_argument unless lambda, cell_depth and cell_width
  /// are positive.
  StripwiseField(double lambda, RewardDistribution dist, std::uint64_t seed,
                 std::uint64_t stream, double cell_depth, double cell_width);

  std::vector<Target> targets_in(double p1_lo, double p1_hi, double p2_lo,
                                 double p2_hi) const override;

  /// Drops cached cells lying entirely at p1 < x1.
  void evict_before(double x1) const;
  std::size_t cached_cells() const;

 private:
  using CellKey = std::pair<std::int64_t, std::int64_t>;
  const std::vector<Target>& cell(std::int64_t i, std::int64_t j) const;

  double lambda_;
  RewardDistribution dist_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  double depth_;
  double width_;
  mutable std::mutex mutex_;
  mutable std::map<CellKey, std::vector<Target>> cells_;
};

/// Field replay format: one header line `# {json}` carrying lambda, region,
/// dist spec, seed and stream, then `p1,p2,reward` and one row per target.
void write_field_csv(std::ostream& out, const MarkedPointField& field);
/// Throws std::runtime_error on malformed input.
MarkedPointField read_field_csv(std::istream& in);

}  // namespace mrm
