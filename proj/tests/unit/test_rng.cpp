#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mrm/rng.hpp"
#include "mrm/stats.hpp"

namespace mrm {
namespace {

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const PhiloxCounter out = philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                          {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxCounter out =
      philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(SeededRng, SameSeedAndStreamGiveIdenticalSequences) {
  SeededRng a(42, 7), b(42, 7);
  for (int i = 0; i < 10'000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeededRng, StreamsDiffer) {
  SeededRng a(42, 7), b(42, 8), c(43, 7);
  int same_b = 0, same_c = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    same_b += x == b.next_u64();
    same_c += x == c.next_u64();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(SeededRng, UniformIsHalfOpenUnitInterval) {
  EXPECT_EQ(to_unit_interval(0), 0.0);
  EXPECT_LT(to_unit_interval(~std::uint64_t{0}), 1.0);
  SeededRng rng(1, 0);
  for (int i = 0; i < 100'000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SeededRng, IndependentStreamsAreUncorrelated) {
  const int n = 200'000;
  SeededRng a(5, 0), b(5, 1);
  double sab = 0.0;
  for (int i = 0; i < n; ++i) sab += (a.uniform() - 0.5) * (b.uniform() - 0.5);
  // Correlation of independent uniforms has standard deviation 1 / sqrt(n).
  const double corr = sab / n * 12.0;
  EXPECT_LT(std::fabs(corr), 4.0 / std::sqrt(n));
}

TEST(SeededRng, NormalMoments) {
  SeededRng rng(9, 3);
  std::vector<double> x(400'000);
  for (double& v : x) v = rng.normal();
  const Estimate e = estimate_mean(x);
  EXPECT_LT(std::fabs(e.mean), 4.0 * e.std_err);
  // Var of the sample variance of N(0,1) is 2 / (n - 1).
  EXPECT_NEAR(sample_variance(x), 1.0, 4.0 * std::sqrt(2.0 / x.size()));
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatch) {
  const double mean = GetParam();
  SeededRng rng(11, static_cast<std::uint64_t>(mean * 100));
  std::vector<double> x(200'000);
  for (double& v : x) v = static_cast<double>(rng.poisson(mean));
  const Estimate e = estimate_mean(x);
  EXPECT_NEAR(e.mean, mean, 4.0 * e.std_err);
  // Var of the sample variance is about (mu4 - sigma^4) / n = (mean + 2 mean^2) / n.
  EXPECT_NEAR(sample_variance(x), mean, 4.0 * std::sqrt((mean + 2 * mean * mean) / x.size()));
}

INSTANTIATE_TEST_SUITE_P(SmallAndLarge, PoissonMoments,
                         ::testing::Values(0.3, 2.5, 9.9, 10.0, 37.0, 1500.0));

TEST(SeededRng, PoissonOfNonPositiveMeanIsZero) {
  SeededRng rng(1, 1);
  EXPECT_EQ(rng.poisson(0.0), 0U);
  EXPECT_EQ(rng.poisson(-3.0), 0U);
}

TEST(KeyedUniform, IsAPureFunctionOfItsKey) {
  const KeyedUniform a(3, 4), b(3, 4), c(3, 5);
  EXPECT_EQ(a.at(10, 20), b.at(10, 20));
  EXPECT_NE(a.at(10, 20), c.at(10, 20));
  EXPECT_NE(a.at(10, 20), a.at(20, 10));
}

TEST(DeriveStream, ChildStreamsAreDistinct) {
  EXPECT_NE(derive_stream(0, 1), derive_stream(0, 2));
  EXPECT_NE(derive_stream(0, 1), derive_stream(1, 1));
  EXPECT_EQ(derive_stream(7, 1), derive_stream(7, 1));
}

}  // namespace
}  // namespace mrm
