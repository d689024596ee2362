#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "paraboloid/arcs.hpp"
#include "paraboloid/lattice.hpp"
#include "paraboloid/report.hpp"

namespace paraboloid {

/// A Fourier coefficient r = (r', r_n) of a dyadic or core piece.
struct CoefficientQuery {
  PieceSpec spec;
  LatticePoint r;
  OperatorParams params;
  int spline_order = kDefaultSplineOrder;
};

// prod_i sigma(r_i) sum_{q, a} eta^_{l,a,q}(|r'|^2 - r_n). Requires the smooth
// cutoff and a dyadic or core spec.
std::complex<double> piece_coefficient(const CoefficientQuery& query);

struct OracleResult {
  std::complex<double> value;
  std::int64_t grid = 0;  // points per bump window at convergence
  double change = 0.0;    // |I(2G) - I(G)| at the last refinement
  double l1 = 0.0;        // integral of |weight| over the windows
};

// Numerical int_T m(xi) e(-r.xi) dxi. The xi' integrals collapse to sigma(r_i)
// by orthogonality; the xi_n integral of each arc's weight is a trapezoid sum
// over its support window, doubled from grid_size until successive values
// differ by at most 1e-9 |I| + 1e-13 l1. Throws ConvergenceError after 4
// refinements and DomainError unless grid_size is a power of two >= 4096.
OracleResult piece_coefficient_oracle(const CoefficientQuery& query, std::int64_t grid_size = 4096);

// Coefficient of m^maj restricted to arcs with q <= q_limit (q_limit <= 0:
// every q <= N/10), summed in closed form over every (q, a, level).
std::complex<double> major_coefficient(const LatticePoint& r, const OperatorParams& params, std::int64_t q_limit = 0,
                                       int spline_order = kDefaultSplineOrder);
OracleResult major_coefficient_oracle(const LatticePoint& r, const OperatorParams& params, std::int64_t q_limit = 0,
                                      std::int64_t grid_size = 4096, int spline_order = kDefaultSplineOrder);

// m^_N(r) - m^maj(r), with m^_N(r) = prod sigma(r_i) [r_n = |r'|^2].
std::complex<double> minor_coefficient(const LatticePoint& r, const OperatorParams& params,
                                       int spline_order = kDefaultSplineOrder);

struct DecayRow {
  LatticePoint r;
  std::int64_t residual = 0;  // |r'|^2 - r_n
  double abs_coefficient = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

// sup over |r_i| <= 2N, |r_n| <= 5N^2 of |piece coefficient|, normalized by
// (N 2^l)^{-1} (QN)^eps (dyadic) or (N^2/Q)^{-1} (QN)^eps (core). When rows is
// given, one row per residual value (its largest coefficient) is appended.
ExperimentReport coefficient_decay_report(const PieceSpec& spec, const OperatorParams& params, double eps = 0.2,
                                          std::vector<DecayRow>* rows = nullptr,
                                          int spline_order = kDefaultSplineOrder);

void write_decay_csv(std::ostream& out, const std::vector<DecayRow>& rows);

// Grid sup of |piece| on T^n, normalized by (N 2^l)^{(n-1)/2} (dyadic),
// (N^2/Q)^{(n-1)/2} (core), N^{(n-1)/2 + eps} (min), N^{n-1} (whole, maj).
// The sup over xi' is exact in structure: sup |m_N| over xi' at fixed xi_n is
// (sup_y |G(xi_n, y)|)^{n-1}. xi_n runs over a grid of step 1/(resolution N^2),
// restricted to the bump windows for block pieces.
ExperimentReport piece_sup_report(const PieceSpec& spec, const OperatorParams& params, int resolution = 8,
                                  double eps = 0.2, int spline_order = kDefaultSplineOrder);

// sup over the scan box of |m^min^(r)| / N^eps.
ExperimentReport minor_coefficient_report(const OperatorParams& params, double eps = 0.2,
                                          int spline_order = kDefaultSplineOrder);

}  // namespace paraboloid
