#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ucontract/circle_measure.hpp"
#include "ucontract/sampling.hpp"

namespace ucontract {
namespace {

TEST(NormalizeAngle, ReducesIntoHalfOpenWindow) {
  EXPECT_DOUBLE_EQ(normalize_angle(0.75).value(), -0.25);
  EXPECT_DOUBLE_EQ(normalize_angle(-0.5).value(), 0.5);
  EXPECT_DOUBLE_EQ(normalize_angle(0.0).value(), 0.0);
  EXPECT_DOUBLE_EQ(normalize_angle(0.5).value(), 0.5);
  EXPECT_DOUBLE_EQ(normalize_angle(3.25).value(), 0.25);
  EXPECT_DOUBLE_EQ(normalize_angle(-1e-17).value(), -1e-17);
}

TEST(NormalizeAngle, RejectsNonFinite) {
  EXPECT_THROW(normalize_angle(std::nan("")), InvalidArgument);
  EXPECT_THROW(normalize_angle(INFINITY), InvalidArgument);
}

TEST(NormalizeAngle, WindowPropertyOnRandomReals) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    const double a = normalize_angle(x).value();
    EXPECT_GT(a, -0.5);
    EXPECT_LE(a, 0.5);
    const double k = x - a;
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(CircleMeasure, MergesSortsAndDropsZeroWeights) {
  CircleMeasure mu({{0.25, 0.25}, {-0.75, 0.25}, {0.1, 0.0}, {0.5, 0.5}});
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_DOUBLE_EQ(mu.atoms()[0].angle, 0.25);
  EXPECT_DOUBLE_EQ(mu.atoms()[0].weight, 0.5);
  EXPECT_DOUBLE_EQ(mu.atoms()[1].angle, 0.5);
}

TEST(CircleMeasure, MergesAcrossTheSeam) {
  CircleMeasure mu({{-0.5 + 1e-14, 0.5}, {0.5, 0.5}});
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_DOUBLE_EQ(mu.atoms()[0].angle, 0.5);
}

TEST(CircleMeasure, RejectsBadWeights) {
  EXPECT_THROW(CircleMeasure({{0.0, 0.5}}), InvalidArgument);
  EXPECT_THROW(CircleMeasure({{0.0, -0.5}, {0.1, 1.5}}), InvalidArgument);
  EXPECT_THROW(CircleMeasure({{0.0, 0.0}}), InvalidArgument);
}

TEST(CircleMeasure, InvariantsOnRandomConstructions) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto mu = random_measure(rng, 12, i % 2 == 0);
    double total = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      total += mu.atoms()[k].weight;
      EXPECT_GT(mu.atoms()[k].weight, 0.0);
      if (k > 0) EXPECT_LT(mu.atoms()[k - 1].angle, mu.atoms()[k].angle);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Moments, PointMassAtOne) {
  const auto m = moments(CircleMeasure::dirac(0.0), 3);
  for (std::size_t k = 0; k <= 3; ++k) EXPECT_EQ(m[k], Complex(1.0, 0.0));
}

TEST(Moments, BernoulliSigns) {
  const auto m = moments(CircleMeasure({{0.0, 0.5}, {0.5, 0.5}}), 2);
  EXPECT_NEAR(std::abs(m[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m[2] - 1.0), 0.0, 1e-15);
}

TEST(Moments, RootsOfUnityVanish) {
  for (std::size_t n : {1u, 2u, 4u, 8u, 17u, 64u}) {
    const auto mu = haar_discretization(n);
    if (n == 1) continue;
    const auto m = moments(mu, n - 1);
    for (std::size_t k = 1; k < n; ++k) {
      // Oracle: direct summation of e^{2 pi i k j / n}.
      std::complex<double> direct(0.0, 0.0);
      for (std::size_t j = 0; j < n; ++j) direct += std::exp(Complex(0.0, kTwoPi * double(k * j) / double(n)));
      direct /= double(n);
      EXPECT_LE(std::abs(m[k]), 1e-12 * double(n)) << "n=" << n << " k=" << k;
      EXPECT_LE(std::abs(m[k] - direct), 1e-12 * double(n));
    }
  }
  const auto m4 = moments(haar_discretization(4), 4);
  EXPECT_NEAR(std::abs(m4[4] - 1.0), 0.0, 1e-12);
}

TEST(Moments, LinearInTheMeasure) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const CircleMeasure parts[2] = {random_measure(rng, 6, false), random_measure(rng, 6, false)};
    std::uniform_real_distribution<double> c(0.0, 1.0);
    const double a = c(rng);
    const double coeffs[2] = {a, 1.0 - a};
    const auto mix = moments(mixture(parts, coeffs), 6);
    const auto m0 = moments(parts[0], 6);
    const auto m1 = moments(parts[1], 6);
    for (std::size_t k = 0; k <= 6; ++k) EXPECT_LE(std::abs(mix[k] - (a * m0[k] + (1 - a) * m1[k])), 1e-12);
    EXPECT_TRUE(mix.bounded());
  }
}

TEST(HaarDiscretization, SmallCases) {
  const auto h1 = haar_discretization(1);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_EQ(h1.atoms()[0].angle, 0.0);
  const auto h2 = haar_discretization(2);
  ASSERT_EQ(h2.size(), 2u);
  EXPECT_EQ(h2.atoms()[0].angle, 0.0);
  EXPECT_EQ(h2.atoms()[1].angle, 0.5);
  EXPECT_EQ(h2.atoms()[1].weight, 0.5);
  EXPECT_THROW(haar_discretization(0), InvalidArgument);
}

TEST(Pushforward, IdentityAndFixedPoints) {
  Rng rng(5);
  const auto mu = random_measure(rng, 8, false);
  EXPECT_TRUE(pushforward(mu, [](double x) { return x; }).approx_equal(mu, 0.0, 0.0));

  const CircleMeasure bernoulli({{0.0, 0.5}, {0.5, 0.5}});
  const auto moved = pushforward(bernoulli, [](double x) { return x * std::pow(std::abs(2 * x), 3.7); });
  EXPECT_TRUE(moved.approx_equal(bernoulli, 0.0, 0.0));
}

TEST(Pushforward, SquaringCollapsesFourthRoots) {
  const auto sq = pushforward(haar_discretization(4), [](double x) { return 2 * x; });
  ASSERT_EQ(sq.size(), 2u);
  EXPECT_NEAR(sq.atoms()[0].angle, 0.0, 1e-15);
  EXPECT_NEAR(sq.atoms()[1].angle, 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(sq.atoms()[0].weight, 0.5);
}

TEST(Pushforward, PreservesMassAndCommutesWithMerging) {
  Rng rng(9);
  auto map = [](double x) { return 3 * x + 0.1; };
  for (int i = 0; i < 100; ++i) {
    // Duplicate every atom: merging first or mapping first must agree.
    const auto mu = random_measure(rng, 6, false);
    std::vector<Atom> doubled;
    for (const auto& a : mu.atoms()) {
      doubled.push_back({a.angle, a.weight / 2});
      doubled.push_back({a.angle, a.weight / 2});
    }
    std::vector<Atom> mapped_raw;
    for (const auto& a : doubled) mapped_raw.push_back({map(a.angle), a.weight});
    const auto after = CircleMeasure(mapped_raw);
    const auto before = pushforward(mu, map);
    EXPECT_TRUE(before.approx_equal(after, 1e-12, 1e-15));
    double total = 0.0;
    for (const auto& a : before.atoms()) total += a.weight;
    EXPECT_NEAR(total, 1.0, 1e-15);
  }
}

TEST(QuantileSample, Degenerate) {
  const auto q = quantile_sample(CircleMeasure::dirac(0.0), 7);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.atoms()[0].angle, 0.0);
  const auto b = quantile_sample(CircleMeasure({{0.0, 0.5}, {0.5, 0.5}}), 2);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.atoms()[0].angle, 0.0);
  EXPECT_EQ(b.atoms()[1].angle, 0.5);
}

TEST(QuantileSample, EighthRootsToFour) {
  // Oracle: integer cumulative walk. Atom j (sorted) covers mass (j, j+1]/8;
  // level (k + 1/2)/4 = (4k + 2)/16 lands in atom ceil((4k+2)/2) - 1 = 2k.
  const auto h8 = haar_discretization(8);
  const auto q = quantile_angles(h8, 4);
  ASSERT_EQ(q.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(q[k], h8.atoms()[2 * k].angle);
  EXPECT_EQ(q[0], -0.375);
  EXPECT_EQ(q[3], 0.375);
  const auto qs = quantile_sample(h8, 4);
  EXPECT_TRUE(qs.equal_weight());
  EXPECT_EQ(qs.size(), 4u);
}

TEST(QuantileSample, IsDeterministicAndReproducesUniformMeasures) {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto mu = random_uniform_measure(rng, 16);
    EXPECT_TRUE(quantile_sample(mu, 16).approx_equal(mu, 0.0, 1e-15));
    EXPECT_EQ(quantile_angles(mu, 33), quantile_angles(mu, 33));
  }
}

}  // namespace
}  // namespace ucontract
