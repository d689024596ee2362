#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "paraboloid/arcs.hpp"
#include "paraboloid/errors.hpp"
#include "paraboloid/exp_sums.hpp"
#include "paraboloid/rng.hpp"

using namespace paraboloid;

namespace {

// Trapezoid rule for a function supported in [lo, hi].
template <typename F>
std::complex<double> trapezoid(F&& f, double lo, double hi, int points) {
  const double h = (hi - lo) / points;
  std::complex<double> sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < points; ++i) sum += f(lo + i * h);
  return sum * h;
}

std::complex<double> e(double x) { return std::polar(1.0, 2.0 * std::numbers::pi * x); }

}  // namespace

TEST(Totatives, Examples) {
  EXPECT_EQ(totatives(6), (std::vector<std::int64_t>{1, 5}));
  EXPECT_EQ(totatives(1), (std::vector<std::int64_t>{0}));
  EXPECT_EQ(totatives(12).size(), 4u);
}

TEST(Totatives, CountIsEulerPhi) {
  for (std::int64_t q = 2; q <= 200; ++q) {
    std::int64_t phi = 0;
    for (std::int64_t a = 1; a < q; ++a) phi += std::gcd(a, q) == 1;
    EXPECT_EQ(static_cast<std::int64_t>(totatives(q).size()), phi) << q;
  }
}

TEST(Farey, OrderedByDenominator) {
  const auto f = farey_fractions(4);
  const std::vector<FareyFraction> expected{{0, 1}, {1, 2}, {1, 3}, {2, 3}, {1, 4}, {3, 4}};
  EXPECT_EQ(f, expected);
}

TEST(MajorArcs, Counts) {
  const auto twenty = major_arcs(20);
  ASSERT_EQ(twenty.size(), 2u);
  EXPECT_EQ(twenty[0].frac, (FareyFraction{0, 1}));
  EXPECT_EQ(twenty[1].frac, (FareyFraction{1, 2}));
  EXPECT_EQ(major_arcs(40).size(), 6u);
}

TEST(MajorArcs, WideArcsDisjointOverASweep) {
  for (std::int64_t N = 10; N <= 400; N += 7) EXPECT_TRUE(wide_arcs_disjoint(major_arcs(N))) << N;
}

TEST(MajorArcs, Geometry) {
  const MajorArc arc{{1, 3}, 30};
  EXPECT_DOUBLE_EQ(arc.radius(), 1.0 / 90.0);
  EXPECT_TRUE(arc.contains(1.0 / 3.0 + 0.5 / 90.0));
  EXPECT_FALSE(arc.contains(1.0 / 3.0 + 2.0 / 90.0));
  EXPECT_TRUE(arc.wide_contains(1.0 / 3.0 + 2.0 / 90.0));
  const MajorArc origin{{0, 1}, 30};
  EXPECT_TRUE(origin.contains(0.99));
}

TEST(MajorArcs, RejectsSmallN) { EXPECT_THROW(major_arcs(9), DomainError); }

TEST(MajorArcs, CsvTable) {
  std::ostringstream os;
  write_arcs_csv(os, major_arcs(20));
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, "q,a,center,radius,wide_radius,scales");
  std::getline(in, row);
  EXPECT_EQ(row.rfind("1,0,0,0.05,0.2,", 0), 0u) << row;
}

TEST(BumpPsi, Values) {
  EXPECT_EQ(bump_psi(0.0), 1.0);
  EXPECT_EQ(bump_psi(2.5), 0.0);
  EXPECT_EQ(bump_psi(-2.5), 0.0);
  for (double x = -1.0; x <= 1.0; x += 0.125) EXPECT_NEAR(bump_psi(x), 1.0, 1e-15) << x;
  for (double x = -2.2; x <= 2.2; x += 0.01) {
    EXPECT_GE(bump_psi(x), 0.0);
    EXPECT_LE(bump_psi(x), 1.0);
  }
  EXPECT_NEAR(bump_psi(1.5), 0.5, 1e-15);
}

TEST(BumpPsi, TransformAtZeroIsMass) { EXPECT_EQ(bump_psi_hat(0.0), 3.0); }

TEST(BumpPsi, TransformMatchesQuadrature) {
  for (int m : {4, 8}) {
    for (double u : {0.3, 1.7}) {
      const auto q = trapezoid([&](double x) { return bump_psi(x, m) * e(u * x); }, -2.0, 2.0, 40000);
      EXPECT_NEAR(q.real(), bump_psi_hat(u, m), 1e-9) << m << " " << u;
      EXPECT_NEAR(q.imag(), 0.0, 1e-9);
    }
  }
}

TEST(BumpPsi, TransformDecay) {
  for (double u : {10.5, 40.5, 160.5}) {
    const double x = std::numbers::pi * u;
    EXPECT_LE(std::abs(bump_psi_hat(u)), std::pow(8.0 / x, 8) / x);
  }
}

TEST(BumpPsi, RejectsLowOrder) { EXPECT_THROW(bump_psi(0.0, 3), DomainError); }

TEST(Ladder, Scales) {
  const BumpLadder ladder({1, 3}, 40);
  const auto& s = ladder.scales();
  EXPECT_EQ(s.front(), 120.0);
  EXPECT_EQ(s.back(), 1600.0);
  for (std::size_t j = 1; j < s.size(); ++j) EXPECT_LT(s[j - 1], s[j]);
  // 2^l < 40/3 for l <= 3.
  EXPECT_EQ(ladder.depth(), 3);
}

TEST(Ladder, PowerOfTwoRatioKeepsScalesStrict) {
  const BumpLadder ladder({0, 1}, 16);
  const auto& s = ladder.scales();
  for (std::size_t j = 1; j < s.size(); ++j) EXPECT_LT(s[j - 1], s[j]);
  EXPECT_EQ(s.back(), 256.0);
}

TEST(LadderProperty, PartitionOfUnityOnEachArc) {
  Rng rng(1, "arcs/telescope");
  for (std::int64_t N : {10, 16, 37, 64, 100}) {
    for (const auto& arc : major_arcs(N)) {
      const BumpLadder ladder(arc.frac, N);
      for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(-1.0, 1.0) * arc.radius();
        double sum = 0.0;
        for (const auto& level : ladder.levels()) sum += ladder.piece(level, u);
        ASSERT_LE(std::abs(sum - 1.0), 1e-12) << N << " " << arc.frac.a << "/" << arc.frac.q;
      }
    }
  }
}

TEST(Eta, MeanZeroInClosedForm) {
  for (std::int64_t N : {16, 64}) {
    for (const auto& arc : major_arcs(N)) {
      const BumpLadder ladder(arc.frac, N);
      for (const auto& level : ladder.levels()) EXPECT_EQ(eta_hat(ladder, level, 0.0), std::complex<double>(0.0));
    }
  }
}

TEST(Eta, DyadicPieceVanishesAtCentre) {
  const BumpLadder ladder({1, 2}, 64);
  for (const auto& level : ladder.levels()) {
    if (!level.core) EXPECT_EQ(eta(ladder, level, 0.5), 0.0) << level.l;
  }
}

TEST(Eta, VanishesOutsideItsSupport) {
  Rng rng(2, "arcs/support");
  const BumpLadder ladder({1, 3}, 50);
  for (const auto& level : ladder.levels()) {
    const double r = ladder.outer_radius(level);
    for (int i = 0; i < 2000; ++i) {
      const double xi = rng.uniform();
      const double d0 = torus_distance(xi, ladder.center());
      const double d1 = torus_distance(xi, ladder.center() + ladder.shift());
      if (d0 > r && d1 > r) ASSERT_EQ(eta(ladder, level, xi), 0.0);
    }
  }
}

TEST(EtaHat, MatchesQuadrature) {
  const BumpLadder ladder({1, 2}, 8);
  for (const auto& level : ladder.levels()) {
    for (double t : {1.0, 7.0, 50.0}) {
      const auto q = trapezoid([&](double xi) { return eta(ladder, level, xi) * e(t * xi); }, 0.0, 1.0, 1 << 16);
      EXPECT_LE(std::abs(q - eta_hat(ladder, level, t)), 1e-8) << level.l << " " << t;
    }
  }
}

TEST(EtaHat, BoundedByTwicePieceTransform) {
  const BumpLadder ladder({2, 5}, 100);
  for (const auto& level : ladder.levels()) {
    for (double t = -300; t <= 300; t += 7) {
      EXPECT_LE(std::abs(eta_hat(ladder, level, t)), 2.0 * std::abs(ladder.piece_hat(level, t)) + 1e-15);
    }
  }
}

TEST(Eta, SupportsDisjointOverASweep) {
  for (std::int64_t N : {10, 16, 20, 32, 50, 64, 100, 128, 200}) EXPECT_TRUE(eta_supports_disjoint(N)) << N;
}

TEST(PieceSpec, Validation) {
  EXPECT_NO_THROW(validate_piece(PieceSpec::dyadic(2, 0), 8));
  EXPECT_NO_THROW(validate_piece(PieceSpec::core(1), 8));
  EXPECT_THROW(validate_piece(PieceSpec::dyadic(3, 0), 64), DomainError);
  EXPECT_THROW(validate_piece(PieceSpec::dyadic(2, 5), 8), DomainError);
  EXPECT_THROW(validate_piece(PieceSpec::dyadic(16, 0), 8), DomainError);
}

TEST(PieceSpec, BlocksAreHalfOpen) {
  EXPECT_EQ(block_denominators(PieceSpec::core(4), 64), (std::vector<std::int64_t>{3, 4}));
  EXPECT_EQ(block_denominators(PieceSpec::core(1), 64), (std::vector<std::int64_t>{1}));
  EXPECT_EQ(block_denominators(PieceSpec::dyadic(8, 0, 6), 64), (std::vector<std::int64_t>{5, 6}));
}

TEST(Decomposition, PieceWeightsSumToMajorWeight) {
  Rng rng(3, "arcs/weights");
  for (std::int64_t N : {16, 40, 64}) {
    const auto pieces = decomposition_pieces(N);
    EXPECT_FALSE(pieces.empty());
    for (int i = 0; i < 500; ++i) {
      const double xi = rng.uniform();
      double sum = 0.0;
      for (const auto& spec : pieces) sum += piece_weight(spec, xi, N);
      EXPECT_NEAR(sum, major_weight(xi, N), 1e-12);
    }
  }
  EXPECT_TRUE(decomposition_pieces(9).empty());
}

TEST(Decomposition, MajorWeightIsOneOnArcs) {
  Rng rng(4, "arcs/weight-one");
  for (std::int64_t N : {16, 64}) {
    for (const auto& arc : major_arcs(N)) {
      for (int i = 0; i < 200; ++i) {
        const double xi = reduce_mod1(arc.center() + rng.uniform(-1.0, 1.0) * arc.radius());
        EXPECT_NEAR(major_weight(xi, N), 1.0, 1e-12);
      }
    }
  }
}

TEST(PieceMultiplier, MajPlusMinIsWhole) {
  Rng rng(5, "arcs/split");
  for (int n : {2, 3}) {
    const auto params = OperatorParams::smooth(n, 32);
    for (int i = 0; i < 500; ++i) {
      std::vector<double> c(static_cast<std::size_t>(n));
      for (auto& x : c) x = rng.uniform();
      const TorusPoint xi(c);
      const auto whole = piece_multiplier(PieceSpec::whole(), xi, params);
      EXPECT_LE(std::abs(whole - multiplier(xi, params)), 1e-12);
      const auto split = piece_multiplier(PieceSpec::maj(), xi, params) + piece_multiplier(PieceSpec::min(), xi, params);
      EXPECT_LE(std::abs(whole - split), 1e-12);
    }
  }
}

TEST(PieceMultiplier, MajorPartVanishesAwayFromArcs) {
  const std::int64_t N = 64;
  const auto params = OperatorParams::smooth(2, N);
  const auto intervals = eta_support_intervals(N);
  const auto arcs = major_arcs(N);
  Rng rng(6, "arcs/far");
  int tested = 0;
  for (int i = 0; i < 5000; ++i) {
    const double xi_n = rng.uniform();
    bool near = false;
    for (const auto& arc : arcs) near = near || arc.wide_contains(xi_n);
    for (const auto& s : intervals) {
      near = near || torus_distance(xi_n, 0.5 * (s.lo + s.hi)) <= 0.5 * (s.hi - s.lo);
    }
    if (near) continue;
    ++tested;
    ASSERT_EQ(piece_multiplier(PieceSpec::maj(), TorusPoint({rng.uniform(), xi_n}), params), std::complex<double>(0.0));
  }
  EXPECT_GT(tested, 1000);
}

TEST(PieceMultiplier, MinorPartVanishesOnArcs) {
  const std::int64_t N = 64;
  const auto params = OperatorParams::smooth(2, N);
  Rng rng(7, "arcs/suppmin");
  for (const auto& arc : major_arcs(N)) {
    for (int i = 0; i < 200; ++i) {
      const double xi_n = reduce_mod1(arc.center() + rng.uniform(-1.0, 1.0) * arc.radius());
      const TorusPoint xi({rng.uniform(), xi_n});
      const double scale = std::abs(multiplier(xi, params));
      EXPECT_LE(std::abs(piece_multiplier(PieceSpec::min(), xi, params)), 1e-13 * std::max(scale, 1.0));
    }
  }
}

TEST(PieceMultiplier, BlockPiecesSumToMajor) {
  const std::int64_t N = 50;
  const auto params = OperatorParams::smooth(2, N);
  Rng rng(8, "arcs/blocks");
  for (int i = 0; i < 200; ++i) {
    const TorusPoint xi({rng.uniform(), rng.uniform()});
    std::complex<double> sum = 0.0;
    for (const auto& spec : decomposition_pieces(N)) sum += piece_multiplier(spec, xi, params);
    EXPECT_LE(std::abs(sum - piece_multiplier(PieceSpec::maj(), xi, params)), 1e-10);
  }
}
