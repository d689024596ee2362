#include <gtest/gtest.h>

#include <cmath>

#include "paraboloid/cutoff_kernel.hpp"
#include "paraboloid/errors.hpp"
#include "paraboloid/lattice.hpp"
#include "paraboloid/rng.hpp"

using namespace paraboloid;

TEST(CutoffValue, SmoothExamples) {
  const auto s = CutoffProfile::smooth(16);
  EXPECT_EQ(cutoff_value(s, 0), 1.0);
  EXPECT_EQ(cutoff_value(s, 40), 0.0);
  EXPECT_EQ(cutoff_value(s, 24), 0.5);
  EXPECT_EQ(cutoff_value(s, -24), 0.5);
}

TEST(CutoffValue, SharpIsIndicatorOfOneToN) {
  const auto s = CutoffProfile::sharp(5);
  for (std::int64_t k = -3; k <= 8; ++k) EXPECT_EQ(s(k), (k >= 1 && k <= 5) ? 1.0 : 0.0) << k;
}

TEST(CutoffValue, SmoothSandwichedBetweenIndicators) {
  for (std::int64_t N : {4, 7, 16, 33}) {
    const auto s = CutoffProfile::smooth(N);
    for (std::int64_t k = -3 * N; k <= 3 * N; ++k) {
      const double lower = std::abs(k) < N ? 1.0 : 0.0;
      const double upper = std::abs(k) < 2 * N ? 1.0 : 0.0;
      EXPECT_GE(s(k), lower);
      EXPECT_LE(s(k), upper);
    }
  }
}

TEST(Ramp, QuinticAtDefaultOrder) {
  for (double u : {0.1, 0.3, 0.5, 0.77}) {
    EXPECT_NEAR(ramp(u, 3), 1.0 - (6 * std::pow(u, 5) - 15 * std::pow(u, 4) + 10 * std::pow(u, 3)), 1e-15);
  }
  EXPECT_EQ(ramp(-1.0, 3), 1.0);
  EXPECT_EQ(ramp(2.0, 3), 0.0);
}

TEST(CutoffChecks, ConstantsHoldAtSixteen) {
  const auto r = cutoff_checks(CutoffProfile::smooth(16));
  EXPECT_TRUE(r.all_checks_passed());
  EXPECT_LE(r.value_of("N_sup_derivative"), 2.0);
  EXPECT_LE(r.value_of("N_total_variation"), 16.0);
}

TEST(CutoffChecks, ConstantsHoldOverASweep) {
  for (std::int64_t N = 4; N <= 512; N *= 2) EXPECT_TRUE(cutoff_checks(CutoffProfile::smooth(N)).all_checks_passed());
}

TEST(CutoffChecks, SharpIsRejected) { EXPECT_THROW(cutoff_checks(CutoffProfile::sharp(16)), DomainError); }

TEST(OperatorParams, Validation) {
  EXPECT_NO_THROW(OperatorParams::sharp(2, 1).validate());
  EXPECT_THROW(OperatorParams::sharp(1, 4).validate(), DomainError);
  EXPECT_THROW(OperatorParams::smooth(2, 3).validate(), DomainError);
  EXPECT_THROW((OperatorParams{2, 8, CutoffProfile::sharp(4)}).validate(), DomainError);
}

TEST(Kernel, SharpTwoDimensional) {
  const auto k = paraboloid_kernel(OperatorParams::sharp(2, 2));
  const auto e = k.entries();
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].point, (LatticePoint{1, 1}));
  EXPECT_EQ(e[1].point, (LatticePoint{2, 4}));
  EXPECT_EQ(e[0].value, Amplitude(1.0));
  EXPECT_EQ(e[1].value, Amplitude(1.0));
}

TEST(Kernel, SharpThreeDimensional) {
  const auto e = paraboloid_kernel(OperatorParams::sharp(3, 2)).entries();
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[0].point, (LatticePoint{1, 1, 2}));
  EXPECT_EQ(e[1].point, (LatticePoint{1, 2, 5}));
  EXPECT_EQ(e[2].point, (LatticePoint{2, 1, 5}));
  EXPECT_EQ(e[3].point, (LatticePoint{2, 2, 8}));
}

TEST(Kernel, SharpSupNormAndMass) {
  for (int n : {2, 3}) {
    for (std::int64_t N : {1, 3, 8}) {
      const auto k = paraboloid_kernel(OperatorParams::sharp(n, N));
      EXPECT_EQ(lp_norm(k, kInfinity), 1.0);
      EXPECT_EQ(lp_power_sum(k, 1.0), std::pow(static_cast<double>(N), n - 1));
    }
  }
}

TEST(Kernel, SmoothSupportSize) {
  const auto params = OperatorParams::smooth(3, 5);
  const auto k = paraboloid_kernel(params);
  const auto side = static_cast<std::size_t>(4 * 5 - 1);
  EXPECT_EQ(k.stored_size(), side * side);
}

TEST(Average, DeltaHitsOneOfTwoTerms) {
  const auto a = average(delta({1, 1}), OperatorParams::sharp(2, 2));
  EXPECT_EQ(a({0, 0}), Amplitude(0.5));
}

TEST(Average, BoxExtremizerIsOneOnTheSmallBox) {
  const auto params = OperatorParams::sharp(2, 3);
  const auto a = average(box_indicator({1, 1}, {6, 18}), params);
  for (std::int64_t x = 1; x <= 3; ++x) {
    for (std::int64_t y = 1; y <= 9; ++y) EXPECT_EQ(a({x, y}), Amplitude(1.0)) << x << "," << y;
  }
}

TEST(Average, DeltaAtOriginSpreadsEvenly) {
  for (int n : {2, 3}) {
    const std::int64_t N = 4;
    const auto params = OperatorParams::sharp(n, N);
    const auto a = average(delta(LatticePoint::origin(static_cast<std::size_t>(n))), params);
    const double expected = 1.0 / std::pow(4.0, n - 1);
    const auto e = a.entries();
    EXPECT_EQ(e.size(), static_cast<std::size_t>(std::pow(4.0, n - 1)));
    for (const auto& [p, v] : e) {
      EXPECT_EQ(v, Amplitude(expected));
      std::int64_t sq = 0;
      for (std::size_t d = 0; d + 1 < p.dim(); ++d) {
        EXPECT_GE(-p[d], 1);
        EXPECT_LE(-p[d], N);
        sq += p[d] * p[d];
      }
      EXPECT_EQ(p[p.dim() - 1], -sq);
    }
  }
}

TEST(Average, StrategiesAgree) {
  Rng rng(21, "cutoff/strategies");
  const auto params = OperatorParams::smooth(2, 6);
  std::vector<LatticeFunction::Entry> entries;
  for (int i = 0; i < 40; ++i) entries.push_back({{rng.uniform_int(-10, 10), rng.uniform_int(-40, 40)}, rng.normal()});
  const auto f = LatticeFunction::from_entries(2, entries);
  EXPECT_LE(max_abs_difference(average(f, params, ConvolutionStrategy::direct),
                               average(f, params, ConvolutionStrategy::fft)),
            1e-10);
}

TEST(Average, RejectsDimensionMismatch) {
  EXPECT_THROW(average(delta({0, 0, 0}), OperatorParams::sharp(2, 3)), DomainError);
}

namespace {

LatticeFunction random_nonnegative(Rng& rng, std::size_t dim, int points) {
  std::vector<LatticeFunction::Entry> entries;
  for (int i = 0; i < points; ++i) {
    LatticePoint p = LatticePoint::origin(dim);
    for (std::size_t d = 0; d < dim; ++d) p[d] = rng.uniform_int(-12, 12);
    entries.push_back({p, rng.uniform()});
  }
  return LatticeFunction::from_entries(dim, std::move(entries));
}

}  // namespace

TEST(AverageProperty, SharpDominatedBySmooth) {
  Rng rng(31, "cutoff/domination");
  for (int trial = 0; trial < 10; ++trial) {
    const std::int64_t N = rng.uniform_int(4, 9);
    const auto f = random_nonnegative(rng, 2, 60);
    const auto sharp = average(f, OperatorParams::sharp(2, N));
    const auto smooth = average(f, OperatorParams::smooth(2, N));
    sharp.for_each([&](const LatticePoint& p, Amplitude v) { EXPECT_LE(v.real(), smooth(p).real() + 1e-12); });
  }
}

TEST(AverageProperty, TrivialBound) {
  Rng rng(32, "cutoff/trivial");
  for (int trial = 0; trial < 8; ++trial) {
    const int n = trial % 2 ? 3 : 2;
    const std::int64_t N = rng.uniform_int(2, 6);
    const auto f = random_nonnegative(rng, static_cast<std::size_t>(n), 50).scaled(Amplitude(1.0, -0.5));
    const auto sharp = OperatorParams::sharp(n, N);
    const auto smooth = OperatorParams::smooth(n, std::max<std::int64_t>(N, 4));
    const double C = std::pow(smooth.cutoff.l1_norm() / static_cast<double>(smooth.N), n - 1);
    EXPECT_LE(C, std::pow(4.0, n - 1));
    for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
      EXPECT_LE(lp_norm(average(f, sharp), p), lp_norm(f, p) * (1 + 1e-12)) << p;
      EXPECT_LE(lp_norm(average(f, smooth), p), C * lp_norm(f, p) * (1 + 1e-12)) << p;
    }
  }
}
