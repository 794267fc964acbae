#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "mrm/rng.hpp"

namespace mrm {

enum class TailClass { LightTailed, HeavyTailed };

struct ConstantReward {
  double value;
  bool operator==(const ConstantReward&) const = default;
};
struct BernoulliReward {
  double p;  // success value is 1, failure 0
  bool operator==(const BernoulliReward&) const = default;
};
/// Support {1, 2, 3, ...}: P(X = k) = p (1 - p)^(k - 1).
struct GeometricReward {
  double p;
  bool operator==(const GeometricReward&) const = default;
};
struct ExponentialReward {
  double rate;
  bool operator==(const ExponentialReward&) const = default;
};
struct ParetoReward {
  double scale;  // x_m
  double tail_index;  // alpha
  bool operator==(const ParetoReward&) const = default;
};

/// Mean and standard deviation; either may be +infinity.
struct Moments {
  double mean;
  double std_dev;
};

/// I.i.d. reward law for lattice vertices and target marks. Parameters are
/// validated on construction; a constructed distribution is always valid and
/// immutable.
class RewardDistribution {
 public:
  using Variant = std::variant<ConstantReward, BernoulliReward, GeometricReward,
                               ExponentialReward, ParetoReward>;

  static RewardDistribution constant(double value);
  static RewardDistribution bernoulli(double p);
  static RewardDistribution geometric(double p);
  static RewardDistribution exponential(double rate);
  static RewardDistribution pareto(double scale, double tail_index);

  /// Parses `family:key=value[,key=value]`, e.g. `pareto:xm=1,alpha=1.5`.
  /// Throws std::invalid_argument on unknown families, missing or extra
  /// keys, or invalid parameter values.
  static RewardDistribution parse(std::string_view spec);

  /// Canonical spec string; parse(to_string()) reproduces the distribution.
  std::string to_string() const;

  const Variant& params() const noexcept { return params_; }

  /// Inverse CDF evaluated at u in [0, 1).
  double quantile(double u) const noexcept;
  /// Maps each uniform in `u` through quantile() in place.
  void quantile_in_place(std::span<double> u) const noexcept;
  double sample(SeededRng& rng) const noexcept { return quantile(rng.uniform()); }
  double cdf(double x) const noexcept;

  Moments moments() const noexcept;
  TailClass tail_class() const noexcept;

  bool operator==(const RewardDistribution&) const = default;

 private:
  explicit RewardDistribution(Variant v) : params_(v) {}
  Variant params_;
};
}  // namespace mrm
