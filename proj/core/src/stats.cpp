#include "mrm/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mrm {

Estimate estimate_mean(std::span<const double> values) {
  Estimate e;
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    e.std_err = std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
  }
  return e;
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

double ks_statistic_one_sample(std::vector<double> values,
                               const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form converges faster: P(K <= l) = sqrt(2 pi)/l sum exp(-(2k-1)^2 pi^2 / 8l^2).
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * w);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_two_sample_pvalue(double statistic, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double root = std::sqrt(ne);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

double ks_one_sample_pvalue(double statistic, std::size_t n) {
  const double root = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic);
}

double chi_square_survival(double statistic, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

double student_t_critical(double confidence, double dof) {
  const boost::math::students_t dist(dof);
  return boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
}

std::string_view to_string(FitModel model) {
  switch (model) {
    case FitModel::PowerLaw: return "power-law";
    case FitModel::ExpGrowth: return "exp-growth";
    case FitModel::Linear: return "linear";
    case FitModel::Constant: return "constant";
  }
  return "unknown";
}

FitModel parse_fit_model(std::string_view name) {
  if (name == "power-law") return FitModel::PowerLaw;
  if (name == "exp-growth") return FitModel::ExpGrowth;
  if (name == "linear") return FitModel::Linear;
  if (name == "constant") return FitModel::Constant;
  throw std::invalid_argument("unknown fit model '" + std::string(name) + "'");
}

FitResult fit(std::span<const double> x, std::span<const double> y, FitModel model) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y sizes differ");
  if (x.size() < 3) throw std::invalid_argument("fit: at least 3 points are required");

  const std::size_t n = x.size();
  std::vector<double> u(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool log_x = model == FitModel::PowerLaw;
    const bool log_y = model == FitModel::PowerLaw || model == FitModel::ExpGrowth;
    if ((log_x && !(x[i] > 0.0)) || (log_y && !(y[i] > 0.0))) {
      throw std::invalid_argument("fit: log-scale model needs positive values");
    }
    u[i] = log_x ? std::log(x[i]) : x[i];
    w[i] = log_y ? std::log(y[i]) : y[i];
  }

  FitResult r;
  r.model = model;
  r.points = n;
  const double dn = static_cast<double>(n);

  if (model == FitModel::Constant) {
    const Estimate e = estimate_mean(w);
    const double t = student_t_critical(0.95, dn - 1.0);
    r.exponent_or_rate = e.mean;
    r.intercept = e.mean;
    r.r_squared = 0.0;
    r.ci95 = {e.mean - t * e.std_err, e.mean + t * e.std_err};
    return r;
  }

  double mu = 0.0, mw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mw += w[i];
  }
  mu /= dn;
  mw /= dn;
  double suu = 0.0, suw = 0.0, sww = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suw += (u[i] - mu) * (w[i] - mw);
    sww += (w[i] - mw) * (w[i] - mw);
  }
  if (!(suu > 0.0)) throw std::invalid_argument("fit: degenerate (constant) abscissa");

  const double slope = suw / suu;
  const double intercept = mw - slope * mu;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = w[i] - intercept - slope * u[i];
    sse += res * res;
  }
  r.exponent_or_rate = slope;
  r.intercept = intercept;
  r.r_squared = sww > 0.0 ? std::clamp(1.0 - sse / sww, 0.0, 1.0) : 1.0;
  const double se = std::sqrt(sse / (dn - 2.0) / suu);
  const double t = student_t_critical(0.95, dn - 2.0);
  r.ci95 = {slope - t * se, slope + t * se};
  return r;
}

}  // namespace mrm
