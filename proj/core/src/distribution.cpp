#include "mrm/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mrm/format.hpp"

namespace mrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_probability(double p) { return p > 0.0 && p <= 1.0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw std::invalid_argument("distribution parameter '" + std::string(key) +
                                "' is not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

RewardDistribution RewardDistribution::constant(double value) {
  require(std::isfinite(value) && value >= 0.0, "constant reward must be finite and >= 0");
  return RewardDistribution(ConstantReward{value});
}

RewardDistribution RewardDistribution::bernoulli(double p) {
  require(is_probability(p), "bernoulli p must lie in (0, 1]");
  return RewardDistribution(BernoulliReward{p});
}

RewardDistribution RewardDistribution::geometric(double p) {
  require(is_probability(p), "geometric p must lie in (0, 1]");
  return RewardDistribution(GeometricReward{p});
}

RewardDistribution RewardDistribution::exponential(double rate) {
  require(std::isfinite(rate) && rate > 0.0, "exponential rate must be > 0");
  return RewardDistribution(ExponentialReward{rate});
}

RewardDistribution RewardDistribution::pareto(double scale, double tail_index) {
  require(std::isfinite(scale) && scale > 0.0, "pareto xm must be > 0");
  require(std::isfinite(tail_index) && tail_index > 0.0, "pareto alpha must be > 0");
  return RewardDistribution(ParetoReward{scale, tail_index});
}

RewardDistribution RewardDistribution::parse(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string family(trim(spec.substr(0, colon)));
  std::map<std::string, double, std::less<>> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      require(eq != std::string_view::npos,
              "malformed distribution parameter '" + std::string(item) + "'");
      const std::string key(trim(item.substr(0, eq)));
      require(kv.emplace(key, parse_number(item.substr(eq + 1), key)).second,
              "duplicate distribution parameter '" + key + "'");
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  auto take = [&](std::string_view key) {
    const auto it = kv.find(key);
    require(it != kv.end(),
            "distribution '" + family + "' requires parameter '" + std::string(key) + "'");
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  auto finish = [&](RewardDistribution d) {
    require(kv.empty(), "unexpected parameter '" + (kv.empty() ? "" : kv.begin()->first) +
                            "' for distribution '" + family + "'");
    return d;
  };
  if (family == "constant") return finish(constant(take("c")));
  if (family == "bernoulli") return finish(bernoulli(take("p")));
  if (family == "geometric") return finish(geometric(take("p")));
  if (family == "exponential") return finish(exponential(take("rate")));
  if (family == "pareto") {
    const double xm = take("xm");
    const double alpha = take("alpha");
    return finish(pareto(xm, alpha));
  }
  throw std::invalid_argument("unknown distribution family '" + family + "'");
}

std::string RewardDistribution::to_string() const {
  return std::visit(
      Overloaded{
          [](const ConstantReward& d) { return "constant:c=" + format_double(d.value); },
          [](const BernoulliReward& d) { return "bernoulli:p=" + format_double(d.p); },
          [](const GeometricReward& d) { return "geometric:p=" + format_double(d.p); },
          [](const ExponentialReward& d) { return "exponential:rate=" + format_double(d.rate); },
          [](const ParetoReward& d) {
            return "pareto:xm=" + format_double(d.scale) +
                   ",alpha=" + format_double(d.tail_index);
          },
      },
      params_);
}

double RewardDistribution::quantile(double u) const noexcept {
  return std::visit(
      Overloaded{
          [](const ConstantReward& d) { return d.value; },
          [u](const BernoulliReward& d) { return u < d.p ? 1.0 : 0.0; },
          [u](const GeometricReward& d) {
            if (d.p >= 1.0) return 1.0;
            const double k = std::ceil(std::log1p(-u) / std::log1p(-d.p));
            return k < 1.0 ? 1.0 : k;
          },
          [u](const ExponentialReward& d) { return -std::log1p(-u) / d.rate; },
          [u](const ParetoReward& d) {
            return d.scale * std::exp(-std::log1p(-u) * (1.0 / d.tail_index));
          },
      },
      params_);
}

void RewardDistribution::quantile_in_place(std::span<double> u) const noexcept {
  std::visit(
      Overloaded{
          [u](const ConstantReward& d) { std::fill(u.begin(), u.end(), d.value); },
          [u](const BernoulliReward& d) {
            for (double& x : u) x = x < d.p ? 1.0 : 0.0;
          },
          [u](const GeometricReward& d) {
            if (d.p >= 1.0) {
              std::fill(u.begin(), u.end(), 1.0);
              return;
            }
            const double denom = std::log1p(-d.p);
            for (double& x : u) x = std::max(1.0, std::ceil(std::log1p(-x) / denom));
          },
          [u](const ExponentialReward& d) {
            for (double& x : u) x = -std::log1p(-x) / d.rate;
          },
          [u](const ParetoReward& d) {
            const double inv = 1.0 / d.tail_index;
            for (double& x : u) x = d.scale * std::exp(-std::log1p(-x) * inv);
          },
      },
      params_);
}

double RewardDistribution::cdf(double x) const noexcept {
  return std::visit(
      Overloaded{
          [x](const ConstantReward& d) { return x < d.value ? 0.0 : 1.0; },
          [x](const BernoulliReward& d) { return x < 0.0 ? 0.0 : (x < 1.0 ? 1.0 - d.p : 1.0); },
          [x](const GeometricReward& d) {
            if (x < 1.0) return 0.0;
            return 1.0 - std::pow(1.0 - d.p, std::floor(x));
          },
          [x](const ExponentialReward& d) { return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x); },
          [x](const ParetoReward& d) {
            return x <= d.scale ? 0.0 : 1.0 - std::pow(d.scale / x, d.tail_index);
          },
      },
      params_);
}

Moments RewardDistribution::moments() const noexcept {
  return std::visit(
      Overloaded{
          [](const ConstantReward& d) { return Moments{d.value, 0.0}; },
          [](const BernoulliReward& d) { return Moments{d.p, std::sqrt(d.p * (1.0 - d.p))}; },
          [](const GeometricReward& d) {
            return Moments{1.0 / d.p, std::sqrt(1.0 - d.p) / d.p};
          },
          [](const ExponentialReward& d) { return Moments{1.0 / d.rate, 1.0 / d.rate}; },
          [](const ParetoReward& d) {
            const double a = d.tail_index;
            const double mean = a > 1.0 ? a * d.scale / (a - 1.0) : kInf;
            const double sd =
                a > 2.0 ? d.scale / (a - 1.0) * std::sqrt(a / (a - 2.0)) : kInf;
            return Moments{mean, sd};
          },
      },
      params_);
}

TailClass RewardDistribution::tail_class() const noexcept {
  return std::holds_alternative<ParetoReward>(params_) ? TailClass::HeavyTailed
                                                       : TailClass::LightTailed;
}

}  // namespace mrm
