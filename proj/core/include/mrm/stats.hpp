#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrm {

/// Monte-Carlo point estimate with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Sample mean and standard error (sample standard deviation / sqrt(n)).
/// A single value has standard error 0.
Estimate estimate_mean(std::span<const double> values);

double sample_variance(std::span<const double> values);

/// Kolmogorov-Smirnov statistics and asymptotic p-values (Kolmogorov
/// distribution series).
double ks_statistic_one_sample(std::vector<double> values,
                               const std::function<double(double)>& cdf);
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);
double kolmogorov_survival(double lambda);
double ks_two_sample_pvalue(double statistic, std::size_t n, std::size_t m);
double ks_one_sample_pvalue(double statistic, std::size_t n);

/// Upper-tail probability of a chi-square distribution.
double chi_square_survival(double statistic, double dof);
/// Two-sided Student-t critical value for the given confidence level.
double student_t_critical(double confidence, double dof);

enum class FitModel { PowerLaw, ExpGrowth, Linear, Constant };

std::string_view to_string(FitModel model);
FitModel parse_fit_model(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Least-squares fit in the model's linearizing coordinates.
/// PowerLaw: log y = a + e log x, reports e. ExpGrowth: log y = a + r x,
/// reports r. Linear: y = a + s x, reports s. Constant: y = c, reports c.
struct FitResult {
  FitModel model = FitModel::Linear;
  double exponent_or_rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  Interval ci95;
  std::size_t points = 0;
};

/// Throws std::invalid_argument with fewer than 3 points, a constant
/// abscissa, or non-positive values in a log coordinate.
FitResult fit(std::span<const double> x, std::span<const double> y, FitModel model);

}  // namespace mrm
