#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paraboloid/arcs.hpp"
#include "paraboloid/coefficients.hpp"
#include "paraboloid/errors.hpp"
#include "paraboloid/rng.hpp"

using namespace paraboloid;

namespace {

CoefficientQuery query(PieceSpec spec, const LatticePoint& r, std::int64_t N) {
  return {spec, r, OperatorParams::smooth(static_cast<int>(r.dim()), N)};
}

}  // namespace

TEST(PieceCoefficient, VanishesExactlyOnTheParaboloid) {
  for (const auto& spec : {PieceSpec::dyadic(2, 0), PieceSpec::dyadic(2, 1), PieceSpec::core(2)}) {
    for (const LatticePoint& r : {LatticePoint{0, 0}, LatticePoint{2, 4}, LatticePoint{-3, 9}, LatticePoint{5, 25}}) {
      EXPECT_EQ(piece_coefficient(query(spec, r, 8)), std::complex<double>(0.0, 0.0));
    }
  }
  EXPECT_EQ(piece_coefficient(query(PieceSpec::dyadic(2, 0), {1, -2, 5}, 4)), std::complex<double>(0.0, 0.0));
}

TEST(PieceCoefficient, VanishesOutsideTheCutoffSupport) {
  for (std::int64_t r1 : {16, -16, 17, 40}) {
    EXPECT_EQ(piece_coefficient(query(PieceSpec::dyadic(2, 0), {r1, 3}, 8)), std::complex<double>(0.0, 0.0));
  }
}

TEST(PieceCoefficient, MatchesOracleAtTheReferenceQuery) {
  const auto q = query(PieceSpec::dyadic(2, 0), {1, 5}, 8);
  const auto closed = piece_coefficient(q);
  const auto oracle = piece_coefficient_oracle(q);
  EXPECT_GT(std::abs(closed), 1e-6);
  EXPECT_LE(std::abs(closed - oracle.value), 1e-8);
  EXPECT_LE(oracle.change, 1e-9 * std::abs(oracle.value) + 1e-13 * oracle.l1);
}

TEST(PieceCoefficient, RequiresSmoothCutoffAndBlockPiece) {
  CoefficientQuery sharp{PieceSpec::dyadic(2, 0), {1, 5}, OperatorParams::sharp(2, 8)};
  EXPECT_THROW(piece_coefficient(sharp), DomainError);
  EXPECT_THROW(piece_coefficient(query(PieceSpec::min(), {1, 5}, 8)), DomainError);
}

TEST(PieceCoefficientOracle, VanishesOnTheParaboloid) {
  const auto oracle = piece_coefficient_oracle(query(PieceSpec::dyadic(2, 1), {3, 9}, 8));
  EXPECT_LE(std::abs(oracle.value), 1e-9);
}

TEST(PieceCoefficientOracle, RejectsBadGridSize) {
  const auto q = query(PieceSpec::dyadic(2, 0), {1, 5}, 8);
  EXPECT_THROW(piece_coefficient_oracle(q, 1000), DomainError);
  EXPECT_THROW(piece_coefficient_oracle(q, 2048), DomainError);
}

TEST(PieceCoefficientOracle, GridDoublingIsStable) {
  const auto q = query(PieceSpec::core(2), {2, 1}, 8);
  const auto a = piece_coefficient_oracle(q, 4096);
  const auto b = piece_coefficient_oracle(q, 8192);
  EXPECT_LE(std::abs(a.value - b.value), 1e-9);
}

TEST(PieceCoefficientOracle, LinearAcrossTheBlock) {
  const std::int64_t N = 8;
  const LatticePoint r{2, 1};
  const auto params = OperatorParams::smooth(2, N);
  std::complex<double> pieces = 0.0, closed = 0.0;
  for (const auto& spec : {PieceSpec::core(2), PieceSpec::dyadic(2, 0), PieceSpec::dyadic(2, 1)}) {
    pieces += piece_coefficient_oracle({spec, r, params}).value;
    closed += piece_coefficient({spec, r, params});
  }
  EXPECT_LE(std::abs(pieces - closed), 1e-8);
}

TEST(PieceCoefficientProperty, ClosedFormEqualsOracleOnRandomQueries) {
  Rng rng(51, "coefficients/oracle");
  for (int trial = 0; trial < 16; ++trial) {
    const bool three = trial % 4 == 3;
    const std::int64_t N = three ? 4 : 8;
    const int n = three ? 3 : 2;
    const int lmax = three ? 0 : 1;
    const auto l = static_cast<int>(rng.uniform_int(-1, lmax));
    const PieceSpec spec = l < 0 ? PieceSpec::core(2) : PieceSpec::dyadic(2, l);
    LatticePoint r = LatticePoint::origin(static_cast<std::size_t>(n));
    for (int d = 0; d + 1 < n; ++d) r[static_cast<std::size_t>(d)] = rng.uniform_int(-2 * N + 1, 2 * N - 1);
    r[static_cast<std::size_t>(n - 1)] = rng.uniform_int(-N * N, 2 * N * N);
    const CoefficientQuery q{spec, r, OperatorParams::smooth(n, N)};
    EXPECT_LE(std::abs(piece_coefficient(q) - piece_coefficient_oracle(q).value), 1e-8) << spec.label();
  }
}

TEST(MajorCoefficient, MatchesOracleOnTruncatedMajorPiece) {
  const auto params = OperatorParams::smooth(2, 20);
  for (const LatticePoint& r : {LatticePoint{1, 3}, LatticePoint{0, 7}, LatticePoint{4, 10}}) {
    const auto closed = major_coefficient(r, params);
    const auto oracle = major_coefficient_oracle(r, params);
    EXPECT_LE(std::abs(closed - oracle.value), 1e-7);
  }
}

TEST(MajorCoefficient, EqualsSumOverDecompositionPieces) {
  const auto params = OperatorParams::smooth(2, 40);
  const LatticePoint r{3, 2};
  std::complex<double> sum = 0.0;
  for (const auto& spec : decomposition_pieces(40)) sum += piece_coefficient({spec, r, params});
  EXPECT_LE(std::abs(sum - major_coefficient(r, params)), 1e-12);
}

TEST(MinorCoefficient, CompletesTheFullCoefficient) {
  const auto params = OperatorParams::smooth(2, 20);
  const LatticePoint on{3, 9}, off{3, 11};
  EXPECT_LE(std::abs(minor_coefficient(off, params) + major_coefficient(off, params)), 1e-15);
  EXPECT_LE(std::abs(minor_coefficient(on, params) + major_coefficient(on, params) - 1.0), 1e-12);
}

TEST(CoefficientDecay, NormalizedSupUniformAcrossN) {
  double lo = 1e300, hi = 0.0;
  for (std::int64_t N : {8, 16, 32}) {
    const auto r = coefficient_decay_report(PieceSpec::dyadic(2, 0), OperatorParams::smooth(2, N));
    EXPECT_TRUE(r.all_checks_passed()) << N;
    lo = std::min(lo, r.constant);
    hi = std::max(hi, r.constant);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi, 3.0 * lo);
}

TEST(CoefficientDecay, ArgmaxLiesInTheBumpBulk) {
  const auto r = coefficient_decay_report(PieceSpec::dyadic(2, 0), OperatorParams::smooth(2, 16));
  const double t = std::abs(r.value_of("argmax_residual"));
  EXPECT_GE(t, 1.0);
  EXPECT_LE(r.value_of("argmax_residual_over_bulk"), 4.0);
  EXPECT_EQ(r.value_of("decay_exponent"), 9.0);
}

TEST(CoefficientDecay, RowsAndCsv) {
  std::vector<DecayRow> rows;
  const auto r = coefficient_decay_report(PieceSpec::core(2), OperatorParams::smooth(2, 8), 0.2, &rows);
  ASSERT_FALSE(rows.empty());
  double best = 0.0;
  for (const auto& row : rows) {
    if (row.residual == 0) EXPECT_EQ(row.abs_coefficient, 0.0);
    best = std::max(best, row.abs_coefficient);
  }
  EXPECT_DOUBLE_EQ(best, r.value_of("sup"));
  std::ostringstream out;
  write_decay_csv(out, rows);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')).find("residual") != std::string::npos, true);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), rows.size() + 1);
}

TEST(PieceSup, WholeMultiplierPeaksAtTheOrigin) {
  for (int n : {2, 3}) {
    const auto params = OperatorParams::smooth(n, 16);
    const auto r = piece_sup_report(PieceSpec::whole(), params);
    const double expected = std::pow(params.cutoff.l1_norm() / 16.0, n - 1);
    EXPECT_NEAR(r.constant, expected, 1e-9 * expected);
    EXPECT_GE(r.constant, 1.0);
    EXPECT_LE(r.constant, std::pow(4.0, n - 1));
  }
}

TEST(PieceSup, MinorPieceNormalizedSupIsStable) {
  double lo = 1e300, hi = 0.0;
  for (std::int64_t N : {16, 32, 64}) {
    const auto r = piece_sup_report(PieceSpec::min(), OperatorParams::smooth(2, N));
    lo = std::min(lo, r.constant);
    hi = std::max(hi, r.constant);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 2.0 * lo);
}

TEST(PieceSup, DyadicPieceVanishesAwayFromItsSupports) {
  const auto params = OperatorParams::smooth(2, 32);
  const auto spec = PieceSpec::dyadic(4, 1, 32 / 10);
  const auto supports = eta_support_intervals(32);
  Rng rng(53, "coefficients/far");
  int tested = 0;
  while (tested < 200) {
    const double t = rng.uniform();
    bool inside = false;
    for (const auto& s : supports) inside = inside || (torus_distance(t, reduce_mod1(0.5 * (s.lo + s.hi))) <= 0.5 * (s.hi - s.lo));
    if (inside) continue;
    EXPECT_EQ(piece_multiplier(spec, TorusPoint({rng.uniform(), t}), params), std::complex<double>(0.0, 0.0)) << t;
    ++tested;
  }
}
