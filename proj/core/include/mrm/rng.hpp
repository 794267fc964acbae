#pragma once

#include <array>
#include <cstdint>

namespace mrm {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53U;
  constexpr std::uint32_t kM1 = 0xCD9E8D57U;
  constexpr std::uint32_t kW0 = 0x9E3779B9U;
  constexpr std::uint32_t kW1 = 0xBB67AE85U;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

/// Maps 64 random bits onto a double in [0, 1) with 53 bits of resolution.
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic 64-bit mixer (SplitMix64 finalizer). Used to derive
/// sub-stream identifiers, never as a generator on its own.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a child stream id from a parent stream and a tag, so that
/// e.g. target positions and reward marks of one trial come from
/// independent streams.
constexpr std::uint64_t derive_stream(std::uint64_t stream, std::uint64_t tag) noexcept {
  return mix64(stream ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

/// Counter-based random stream. The pair (seed, stream_id) fully determines
/// the sample sequence; streams with different ids are independent, so
/// parallel trials never share state and results do not depend on
/// scheduling order.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on the half-open interval [0, 1).
  double uniform() noexcept { return to_unit_interval(next_u64()); }

  /// Standard normal draw (Box-Muller, no cached second value so the
  /// sequence is a pure function of the draw count).
  double normal() noexcept;

  /// Poisson(mean) count. Multiplicative inversion for small means, PTRS
  /// transformed rejection (Hoermann 1993) otherwise.
  std::uint64_t poisson(double mean) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
};

/// Random access uniform draws addressed by a 2-D integer index, e.g. a
/// lattice vertex. Any sub-region of the index space yields the same values
/// no matter how much of it is materialized.
class KeyedUniform {
 public:
  KeyedUniform(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  double at(std::uint32_t i, std::uint32_t j) const noexcept {
    const PhiloxCounter out = philox4x32_10({i, j, stream_lo_, stream_hi_}, key_);
    return to_unit_interval((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
  }

 private:
  PhiloxKey key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
};

}  // namespace mrm
