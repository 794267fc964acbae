#include "mrm/rng.hpp"

#include <cmath>
#include <numbers>

namespace mrm {

namespace {

// Keyed access uses a different key schedule than sequential streams so the
// two addressing modes never alias even for equal (seed, stream).
constexpr std::uint64_t kKeyedDomain = 0x5851F42D4C957F2DULL;

}  // namespace

std::uint64_t SeededRng::next_u64() noexcept {
  if (buffered_ == 0) {
    const PhiloxCounter counter{static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(stream_),
                                static_cast<std::uint32_t>(stream_ >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(seed_),
                        static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = philox4x32_10(counter, key);
    ++block_;
    buffered_ = 2;
  }
  const int base = (2 - buffered_) * 2;
  --buffered_;
  return (static_cast<std::uint64_t>(buffer_[base + 1]) << 32) | buffer_[base];
}

double SeededRng::normal() noexcept {
  // 1 - U lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SeededRng::poisson(double mean) noexcept {
  if (!(mean > 0.0)) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::uint64_t count = 0;
    double product = uniform();
    while (product > limit) {
      ++count;
      product *= uniform();
    }
    return count;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

KeyedUniform::KeyedUniform(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  const std::uint64_t k = mix64(seed ^ kKeyedDomain);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  stream_lo_ = static_cast<std::uint32_t>(stream_id);
  stream_hi_ = static_cast<std::uint32_t>(stream_id >> 32);
}

}  // namespace mrm
