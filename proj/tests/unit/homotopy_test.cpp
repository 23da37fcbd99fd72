#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ucontract/homotopy.hpp"
#include "ucontract/sampling.hpp"

namespace ucontract {
namespace {

UnitaryMatrix haar_spectrum_unitary(std::size_t n, std::uint64_t seed) {
  return unitary_with_spectrum(haar_discretization(n).angles(), seed);
}

TEST(FMap, Values) {
  EXPECT_EQ(f_map(0.0, 0.3), 0.3);
  EXPECT_EQ(f_map(2.0, 0.0), 0.0);
  EXPECT_EQ(f_map(2.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(f_map(1.0, 0.25), 0.125);
  EXPECT_DOUBLE_EQ(f_map(2.0, -0.25), -0.0625);
  EXPECT_DOUBLE_EQ(f_map(1.0, 0.75), -0.125);
  EXPECT_THROW(f_map(-1.0, 0.1), InvalidArgument);
  EXPECT_THROW(DeformationParams(std::nan("")), InvalidArgument);
}

TEST(FMap, ChordalLipschitzConstantIsTPlusOne) {
  // |f_t'| = (t+1)|2x|^t <= t+1 and f_t fixes the seam, so chords stretch by
  // at most t+1, comfortably inside the 2t+1 used by the distance bound.
  Rng rng(1);
  for (double t : {0.5, 1.0, 2.0, 4.0, 6.0}) {
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double x = uniform_angle(rng);
      const double y = uniform_angle(rng);
      const double c = chordal_distance(x, y);
      if (c < 1e-9) continue;
      worst = std::max(worst, chordal_distance(f_map(t, x), f_map(t, y)) / c);
    }
    EXPECT_LE(worst, t + 1.0 + 1e-9) << t;
    EXPECT_GT(worst, 0.9 * (t + 1.0)) << t;
  }
}

TEST(GDeform, IdentityAtZeroAndFixesMinusOne) {
  const auto u = sample_haar_unitary(16, 2);
  EXPECT_EQ(g_deform(u, 0.0).matrix(), u.matrix());
  const auto minus = UnitaryMatrix::scalar(16, 0.5);
  const Matrix minus_one = -Matrix::Identity(16, 16);
  EXPECT_LE((g_deform(minus, 3.0).matrix() - minus_one).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GDeform, NormToIdentityDecreasesInT) {
  const auto u = haar_spectrum_unitary(256, 3);
  double prev = distance_to_identity(u);
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double d = distance_to_identity(g_deform(u, t));
    EXPECT_LT(d, prev) << t;
    prev = d;
  }
}

TEST(GDeform, HaarSpectrumClosedForm) {
  // For Haar spectrum ||g_t - 1||_2^2 = int_{-1/2}^{1/2} 2 - 2 cos(2 pi f_t(x)) dx.
  // Oracle: midpoint rule at 2e5 points.
  const auto u = UnitaryMatrix::diagonal(haar_discretization(4096).angles());
  for (double t : {1.0, 6.0}) {
    const int m = 200000;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      const double x = -0.5 + (i + 0.5) / m;
      acc += 2.0 - 2.0 * std::cos(kTwoPi * f_map(t, x));
    }
    EXPECT_NEAR(distance_to_identity(g_deform(u, t)), std::sqrt(acc / m), 2e-3) << t;
  }
}

TEST(Lemma32, HaarSpectrumAtZero) {
  const auto u = haar_spectrum_unitary(64, 4);
  const auto b = lemma32_bound(u, 0.0, 64);
  EXPECT_NEAR(b.dist_to_haar, 0.0, 1e-9);
  EXPECT_NEAR(b.lhs, std::numbers::sqrt2, 1e-10);
  EXPECT_NEAR(b.rhs_stated, 1.2533141373155, 1e-9);
  EXPECT_NEAR(b.rhs_corrected, 1.8137993642342, 1e-9);
  // The uncorrected tail undershoots here; the corrected one holds.
  EXPECT_GT(b.lhs, b.rhs_stated);
  EXPECT_LE(b.lhs, b.rhs_corrected);
}

TEST(Lemma32, CorrectedBoundHoldsOnRandomSpectra) {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto u = unitary_with_measure(random_measure(rng, 6, false), 64, i);
    for (double t : {0.0, 0.5, 2.0, 6.0}) {
      const auto b = lemma32_bound(u, t, 256);
      EXPECT_LE(b.lhs, b.rhs_corrected + 1e-9) << "i=" << i << " t=" << t;
    }
  }
}

TEST(Schedule, Examples) {
  EXPECT_DOUBLE_EQ(schedule_s(3.0, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(schedule_s(1.0, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(schedule_s(5.0, 0.0), 5.0);
  EXPECT_DOUBLE_EQ(schedule_s(0.0, 1.0), 0.0);
  EXPECT_THROW(schedule_s(-1.0, 0.1), InvalidArgument);
}

TEST(Ladder, DeterministicAndUnitary) {
  const auto a = build_ladder(16, 3, 11);
  const auto b = build_ladder(16, 3, 11);
  ASSERT_EQ(a.stages(), 3u);
  for (std::size_t m = 0; m <= 3; ++m) EXPECT_EQ(a.prefix(m).matrix(), b.prefix(m).matrix());
  EXPECT_NE(a.prefix(1).matrix(), build_ladder(16, 3, 12).prefix(1).matrix());
  for (const auto& x : a.generators()) EXPECT_LE(x.operator_norm(), 1.0);
  EXPECT_THROW(a.right_factor(3.5), InvalidArgument);
  EXPECT_THROW(a.right_factor(-0.1), InvalidArgument);
}

TEST(HPath, EndpointsAndContinuity) {
  const auto ladder = build_ladder(24, 4, 3);
  const auto u = sample_haar_unitary(24, 99);
  EXPECT_LE((h_path(ladder, u, 0.0).matrix() - u.matrix()).cwiseAbs().maxCoeff(), 1e-14);
  for (std::size_t m = 1; m <= 4; ++m) {
    const auto h = h_path(ladder, u, static_cast<double>(m));
    const auto before = h_path(ladder, u, static_cast<double>(m) - 1e-9);
    EXPECT_LE(two_norm(h.matrix() - before.matrix()), 1e-8) << m;
  }
  // Within a stage the path moves at speed at most pi ||X|| in the 2-norm.
  for (double t : {0.2, 1.3, 2.7}) {
    const double dt = 0.05;
    const double step = two_norm(h_path(ladder, u, t + dt).matrix() - h_path(ladder, u, t).matrix());
    EXPECT_LE(step, std::numbers::pi * dt + 1e-12);
  }
}

TEST(HPath, ConvergesTowardHaarSpectrum) {
  const auto ladder = build_ladder(256, 4, 21);
  const auto u = UnitaryMatrix::identity(256);
  const double d0 = w2_to_haar(spectral_measure(h_path(ladder, u, 0.0)), 256).distance;
  const double d4 = w2_to_haar(spectral_measure(h_path(ladder, u, 4.0)), 256).distance;
  EXPECT_NEAR(d0, std::numbers::sqrt2, 1e-9);
  EXPECT_LE(d4, 0.15);
}

TEST(Contract, StartsAtTheInputAndRecordsSchedule) {
  const auto ladder = build_ladder(32, 2, 8);
  const auto u = sample_haar_unitary(32, 1);
  const auto trace = contract(ladder, u, {0.0, 0.5, 1.0, 2.0}, 64, "haar");
  ASSERT_EQ(trace.samples.size(), 4u);
  EXPECT_EQ(trace.samples[0].schedule_s, 0.0);
  EXPECT_NEAR(trace.samples[0].norm_to_identity, distance_to_identity(u), 1e-12);
  for (const auto& s : trace.samples) EXPECT_DOUBLE_EQ(s.schedule_s, schedule_s(s.t, s.dist_to_haar));
  EXPECT_EQ(trace.label, "haar");
  EXPECT_EQ(trace.n, 32u);
  EXPECT_THROW(contract(ladder, u, {0.0, 0.0}, 64), InvalidArgument);
  EXPECT_THROW(contract(ladder, u, {0.0, 3.0}, 64), InvalidArgument);
}

TEST(Contract, IdentityInputLeavesIdentityThenApproachesHaar) {
  const auto ladder = build_ladder(128, 4, 17);
  const auto trace = contract(ladder, UnitaryMatrix::identity(128), {0.0, 1.0, 2.0, 4.0}, 128);
  EXPECT_EQ(trace.samples[0].norm_to_identity, 0.0);
  EXPECT_GT(trace.samples[1].norm_to_identity, 0.5);
  EXPECT_LE(trace.samples.back().dist_to_haar, 0.2);
}

TEST(AdaptiveLadder, AcceptsFreeCandidatesAndFlagsRejects) {
  AdaptiveOptions opts;
  opts.probes = {UnitaryMatrix::diagonal(quantile_angles(CircleMeasure({{0.0, 0.5}, {0.2, 0.5}}), 128))};
  opts.max_length = 2;
  opts.max_power = 2;
  opts.target = 0.5;
  const auto easy = build_ladder(128, 2, 4, &opts);
  for (const auto& r : easy.reports()) {
    EXPECT_TRUE(r.accepted);
    EXPECT_EQ(r.attempts, 1u);
  }
  opts.target = 1e-9;
  opts.max_retries = 2;
  const auto hard = build_ladder(128, 1, 4, &opts);
  EXPECT_FALSE(hard.reports()[0].accepted);
  EXPECT_EQ(hard.reports()[0].attempts, 3u);
  EXPECT_GT(hard.reports()[0].defect, 1e-9);
}

}  // namespace
}  // namespace ucontract
