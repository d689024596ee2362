#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "paraboloid/errors.hpp"
#include "paraboloid/experiments.hpp"
#include "paraboloid/lattice.hpp"

using namespace paraboloid;

TEST(ExponentPair, ConjugateAndThreshold) {
  const auto e = ExponentPair::from_p(1.5);
  EXPECT_DOUBLE_EQ(1.0 / e.p + 1.0 / e.p_prime, 1.0);
  EXPECT_EQ(e.q, e.p_prime);
  EXPECT_EQ(ExponentPair::from_p(1.5, 1.2).q, 1.2);
  EXPECT_DOUBLE_EQ(ExponentPair::sharp_threshold(2), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(ExponentPair::sharp_threshold(3), 1.5);
  EXPECT_THROW(ExponentPair::from_p(1.0), DomainError);
  EXPECT_THROW(ExponentPair::from_p(2.5), DomainError);
  EXPECT_TRUE(std::isinf(conjugate_exponent(1.0)));
  EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
}

TEST(Exponents, TheoremAndDelta) {
  EXPECT_DOUBLE_EQ(theorem_exponent(2, 2.0), 0.0);
  EXPECT_NEAR(theorem_exponent(2, 1.8), -1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(delta_exponent(3, 2.0), -1.0);
  for (int n : {2, 3, 4}) {
    const double t = ExponentPair::sharp_threshold(n);
    EXPECT_NEAR(theorem_exponent(n, t), delta_exponent(n, t), 1e-14);
  }
}

TEST(FitScaling, RecoversExactPowerLaw) {
  const std::vector<double> Ns{4, 8, 16, 32, 64};
  std::vector<double> values;
  for (double N : Ns) values.push_back(3.0 * std::pow(N, -0.7));
  const auto fit = fit_scaling(Ns, values, -0.5);
  EXPECT_NEAR(fit.slope, -0.7, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.residual, 0.2, 1e-12);
}

TEST(FitScaling, Preconditions) {
  EXPECT_THROW(fit_scaling({1, 2, 3}, {1, 1, 1}, 0.0), DomainError);
  EXPECT_THROW(fit_scaling({1, 2, 3, 4}, {1, 1, 0, 1}, 0.0), DomainError);
}

TEST(Source, NamesRoundTrip) {
  for (auto s : {RatioSource::box, RatioSource::delta, RatioSource::ascent, RatioSource::l2}) {
    EXPECT_EQ(parse_source(source_name(s)), s);
  }
  EXPECT_THROW(parse_source("gaussian"), DomainError);
}

TEST(NormL1Linf, Examples) {
  EXPECT_DOUBLE_EQ(norm_l1_linf(OperatorParams::sharp(2, 8)), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(norm_l1_linf(OperatorParams::sharp(3, 4)), 1.0 / 16.0);
  for (std::int64_t N : {4, 9, 16}) EXPECT_DOUBLE_EQ(norm_l1_linf(OperatorParams::smooth(2, N)), 1.0 / N);
}

TEST(NormL2L2, SharpIsOne) {
  for (std::int64_t N : {4, 8, 16}) {
    const auto r = norm_l2_l2(OperatorParams::sharp(2, N));
    EXPECT_DOUBLE_EQ(r.value, 1.0);
    EXPECT_TRUE(r.certified);
    EXPECT_GE(r.certificate, 0.8 * r.value);
    EXPECT_LE(r.certificate, r.value + 1e-9);
  }
}

TEST(NormL2L2, SmoothPeaksAtOrigin) {
  for (int n : {2, 3}) {
    const auto params = OperatorParams::smooth(n, 6);
    const auto r = norm_l2_l2(params);
    EXPECT_NEAR(r.value, std::pow(params.cutoff.l1_norm() / 6.0, n - 1), 1e-12);
  }
}

TEST(NormL2L2Property, BoundsRandomRayleighQuotients) {
  for (const auto& params : {OperatorParams::sharp(2, 8), OperatorParams::smooth(2, 6), OperatorParams::sharp(3, 3)}) {
    const auto r = random_rayleigh_report(params, norm_l2_l2(params).value, 20, 7);
    EXPECT_TRUE(r.all_checks_passed());
    EXPECT_GT(r.value_of("max_quotient"), 0.0);
  }
}

TEST(BoxExtremizer, AveragesToOneOnTheSmallBox) {
  for (int n : {2, 3}) EXPECT_TRUE(box_extremizer_check(OperatorParams::sharp(n, 4)).all_checks_passed());
  const auto f = box_extremizer(OperatorParams::sharp(2, 5));
  EXPECT_EQ(lp_power_sum(f, 1.0), 10.0 * 50.0);
}

TEST(BoxExtremizer, RatioAboveTheSmallBoxLowerBound) {
  for (int n : {2, 3}) {
    for (std::int64_t N : {2, 4, 8}) {
      if (n == 3 && N == 8) continue;
      for (double p : {1.2, 1.5, 1.8, 2.0}) {
        const double pp = conjugate_exponent(p);
        const double small = std::pow(static_cast<double>(N), n + 1);
        const double big = std::pow(2.0, n - 1) * n * small;
        const double lower = std::pow(small, 1.0 / pp) / std::pow(big, 1.0 / p);
        EXPECT_GE(box_extremizer_ratio(OperatorParams::sharp(n, N), p), lower * (1 - 1e-12)) << n << N << p;
      }
    }
  }
}

TEST(BoxExtremizer, BoundedAtPTwo) {
  for (std::int64_t N : {4, 8, 16, 32}) {
    const double r = box_extremizer_ratio(OperatorParams::sharp(2, N), 2.0);
    EXPECT_GT(r, 0.3);
    EXPECT_LE(r, 1.0);
  }
}

TEST(BoxExtremizer, RequiresSharpCutoff) {
  EXPECT_THROW(box_extremizer_ratio(OperatorParams::smooth(2, 8), 1.5), DomainError);
}

TEST(DeltaExtremizer, Examples) {
  EXPECT_DOUBLE_EQ(delta_extremizer_ratio(OperatorParams::sharp(2, 16), 2.0), 0.25);
  for (const auto& params : {OperatorParams::sharp(2, 8), OperatorParams::sharp(3, 4)}) {
    EXPECT_DOUBLE_EQ(delta_extremizer_ratio(params, 1.0), norm_l1_linf(params));
    EXPECT_TRUE(delta_extremizer_check(params).all_checks_passed());
  }
  EXPECT_NEAR(delta_extremizer_ratio(OperatorParams::sharp(3, 5), 1.5), std::pow(5.0, -2.0 / 1.5), 1e-14);
}

TEST(Ascent, StartsAboveTheExtremizersAndIsMonotone) {
  const auto params = OperatorParams::sharp(2, 4);
  const double p = 1.7;
  const auto a = random_ascent_lower_bound(params, p, 3, 300);
  const double start = std::max(box_extremizer_ratio(params, p), delta_extremizer_ratio(params, p));
  EXPECT_GE(a.start, start - 1e-12);
  EXPECT_GE(a.best, start - 1e-12);
  ASSERT_EQ(a.trajectory.size(), 300u);
  for (std::size_t i = 1; i < a.trajectory.size(); ++i) EXPECT_GE(a.trajectory[i], a.trajectory[i - 1]);
  EXPECT_NEAR(a.trajectory.back(), a.best, 1e-9 * a.best);
}

TEST(Ascent, DeterministicGivenSeed) {
  const auto params = OperatorParams::sharp(2, 4);
  const auto a = random_ascent_lower_bound(params, 1.5, 11, 200);
  const auto b = random_ascent_lower_bound(params, 1.5, 11, 200);
  EXPECT_EQ(a.trajectory, b.trajectory);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(max_abs_difference(a.best_f, b.best_f), 0.0);
}

TEST(Ascent, BestFunctionAttainsTheReportedRatio) {
  const auto params = OperatorParams::sharp(2, 3);
  const double p = 1.6;
  const auto a = random_ascent_lower_bound(params, p, 5, 200);
  const double ratio = lp_norm(average(a.best_f, params), conjugate_exponent(p)) / lp_norm(a.best_f, p);
  EXPECT_NEAR(ratio, a.best, 1e-9 * a.best);
  a.best_f.for_each([](const LatticePoint&, Amplitude v) { EXPECT_GE(v.real(), 0.0); });
}

TEST(Ascent, Preconditions) {
  EXPECT_THROW(random_ascent_lower_bound(OperatorParams::sharp(2, 4), 1.5, 1, 0), DomainError);
  EXPECT_THROW(random_ascent_lower_bound(OperatorParams::sharp(2, 4), 2.5, 1, 10), DomainError);
}

TEST(ScalingFit, BoxSlopeBelowThreshold) {
  const auto fit = scaling_fit(2, {8, 16, 32, 64, 128}, 1.8, RatioSource::box);
  EXPECT_NEAR(fit.target, -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(fit.slope, -1.0 / 3.0, 0.15);
}

TEST(ScalingFit, BoxSlopeVanishesAtPTwo) {
  const auto fit = scaling_fit(2, {8, 16, 32, 64}, 2.0, RatioSource::box);
  EXPECT_EQ(fit.target, 0.0);
  EXPECT_NEAR(fit.slope, 0.0, 0.05);
}

TEST(ScalingFit, DeltaSlopesAreExact) {
  const auto at_threshold = scaling_fit(2, {4, 8, 16, 32}, 5.0 / 3.0, RatioSource::delta);
  EXPECT_NEAR(at_threshold.slope, -0.6, 0.05);
  EXPECT_NEAR(at_threshold.target, -0.6, 1e-15);
  const auto three = scaling_fit(3, {2, 4, 8, 16}, 2.0, RatioSource::delta);
  EXPECT_NEAR(three.slope, -1.0, 0.05);
}

TEST(ScalingFit, RejectsFewerThanFourScales) {
  EXPECT_THROW(scaling_fit(2, {8, 16, 32}, 1.8, RatioSource::box), DomainError);
}

TEST(ScalingFitProperty, CrossoverAtTheThreshold) {
  for (int n : {2, 3}) {
    const std::vector<std::int64_t> Ns = n == 2 ? std::vector<std::int64_t>{8, 16, 32, 64}
                                                : std::vector<std::int64_t>{4, 6, 8, 12};
    const double t = ExponentPair::sharp_threshold(n);
    for (double p : {t - 0.12, t + 0.12}) {
      const auto box = scaling_fit(n, Ns, p, RatioSource::box);
      const auto del = scaling_fit(n, Ns, p, RatioSource::delta);
      if (p > t) {
        EXPECT_GT(box.slope, del.slope) << n << " " << p;
      } else {
        EXPECT_LT(box.slope, del.slope) << n << " " << p;
      }
    }
  }
}

TEST(SeparationProbe, DisjointDoublingOfADelta) {
  const std::int64_t N = 4;
  const auto params = OperatorParams::sharp(2, N);
  const auto r = two_bump_separation_probe(delta({0, 0}), {{10 * N * N, 0}}, 2.0, 1.0, params);
  EXPECT_TRUE(r.all_checks_passed());
  EXPECT_DOUBLE_EQ(r.value_of("f_norm_1"), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(r.value_of("Af_norm_1"), 2.0 * r.value_of("Af_norm_0"));
}

TEST(SeparationProbe, GainPerDoubling) {
  const std::int64_t N = 4;
  const auto params = OperatorParams::sharp(2, N);
  std::vector<LatticePoint> shifts;
  for (int j = 0; j < 5; ++j) shifts.push_back({(10 * N * N) << j, 0});
  const auto f = box_indicator({0, 0}, {2, 3});
  const auto r = two_bump_separation_probe(f, shifts, 2.0, 1.0, params);
  EXPECT_TRUE(r.all_checks_passed());
  EXPECT_NEAR(r.value_of("total_gain"), std::pow(2.0, 5 * 0.5), 1e-12);

  const auto flat = two_bump_separation_probe(f, shifts, 1.5, 1.5, params);
  EXPECT_NEAR(flat.value_of("total_gain"), 1.0, 1e-12);
}

TEST(SeparationProbe, OverlapIsReportedNotFailed) {
  const auto params = OperatorParams::sharp(2, 4);
  const auto r = two_bump_separation_probe(box_indicator({0, 0}, {3, 3}), {{1, 0}}, 2.0, 1.0, params);
  EXPECT_EQ(r.value_of("disjoint_1"), 0.0);
  EXPECT_TRUE(r.all_checks_passed());
}

TEST(InterpolationProperty, BoxRatioBelowRieszThorinBound) {
  for (int n : {2, 3}) {
    for (double p : {1.1, 1.4, 1.7, 1.9}) {
      const auto params = OperatorParams::sharp(n, n == 2 ? 8 : 4);
      EXPECT_TRUE(interpolation_check(params, p).all_checks_passed()) << n << " " << p;
    }
  }
}
