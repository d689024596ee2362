#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "paraboloid/cutoff_kernel.hpp"
#include "paraboloid/exp_sums.hpp"

namespace paraboloid {

inline constexpr int kDefaultSplineOrder = 8;

/// Reduced fraction a/q with 0 <= a < q; q = 1 is the fraction 0/1.
struct FareyFraction {
  std::int64_t a = 0;
  std::int64_t q = 1;

  double value() const { return static_cast<double>(a) / static_cast<double>(q); }
  friend bool operator==(const FareyFraction&, const FareyFraction&) = default;
};

// A_q = {1 <= a <= q-1 : gcd(a, q) = 1} for q >= 2, and A_1 = {0}.
std::vector<std::int64_t> totatives(std::int64_t q);

// All a/q with 1 <= q <= qmax and a in A_q, ordered by (q, a).
std::vector<FareyFraction> farey_fractions(std::int64_t qmax);

/// I(q,N,a) = [a/q - 1/(qN), a/q + 1/(qN)] and the enlarged arc 4I.
struct MajorArc {
  FareyFraction frac;
  std::int64_t N = 1;

  double center() const { return frac.value(); }
  double radius() const { return 1.0 / (static_cast<double>(frac.q) * static_cast<double>(N)); }
  double wide_radius() const { return 4.0 * radius(); }
  bool contains(double xi) const;
  bool wide_contains(double xi) const;
};

// Arcs for every a/q with q <= N/10. Requires N >= 10; throws
// InvariantError if two enlarged arcs 4I intersect on the torus.
std::vector<MajorArc> major_arcs(std::int64_t N);

// True when the closed intervals 4I are pairwise disjoint on the torus.
bool wide_arcs_disjoint(const std::vector<MajorArc>& arcs);

// CSV with columns q,a,center,radius,wide_radius,scales (scales joined by ';').
void write_arcs_csv(std::ostream& out, const std::vector<MajorArc>& arcs, int spline_order = kDefaultSplineOrder);

// psi = 1_[-3/2,3/2] * beta_m, where beta_m is the centered B-spline of order m
// rescaled to support [-1/2, 1/2] and unit mass. psi = 1 on [-1,1], 0 outside
// (-2,2), C^{m-1} smooth. Requires m >= 4.
double bump_psi(double x, int m = kDefaultSplineOrder);

// Closed form of psi^(u) = int psi(x) e(ux) dx
//   = (sin(3 pi u) / (pi u)) (sin(pi u/m) / (pi u/m))^m.
double bump_psi_hat(double u, int m = kDefaultSplineOrder);

struct LadderLevel {
  bool core = false;
  int l = 0;

  static LadderLevel dyadic(int l) { return {false, l}; }
  static LadderLevel core_level() { return {true, 0}; }
  friend bool operator==(const LadderLevel&, const LadderLevel&) = default;
};

/// Bump ladder of one fraction a/q at scale N.
///
/// Scales S_j = 2^j N q for j <= L and S_{L+1} = N^2, with
/// L = max{l >= 0 : 2^l < N/q}. Pieces p_l(u) = psi(S_l u) - psi(S_{l+1} u)
/// for l <= L and the core psi(N^2 u) telescope to psi(N q u). Requires
/// q < N so that the ladder is nonempty.
class BumpLadder {
 public:
  BumpLadder(FareyFraction frac, std::int64_t N, int spline_order = kDefaultSplineOrder);

  const FareyFraction& frac() const { return frac_; }
  std::int64_t scale() const { return N_; }
  int spline_order() const { return m_; }
  int depth() const { return L_; }
  const std::vector<double>& scales() const { return scales_; }
  std::vector<LadderLevel> levels() const;
  bool has_level(LadderLevel level) const;

  double center() const { return frac_.value(); }
  // The mean-zero translate 3/(Nq).
  double shift() const;

  double piece(LadderLevel level, double u) const;
  // Transform of the piece: psi^(t/S_l)/S_l - psi^(t/S_{l+1})/S_{l+1}.
  double piece_hat(LadderLevel level, double t) const;
  // p vanishes for |u| >= outer and (dyadic) for |u| <= inner.
  double outer_radius(LadderLevel level) const;
  double inner_radius(LadderLevel level) const;

 private:
  void require(LadderLevel level) const;

  FareyFraction frac_;
  std::int64_t N_;
  int m_;
  int L_;
  std::vector<double> scales_;
};

// eta(xi) = p(xi - a/q) - p(xi - a/q - 3/(Nq)) on the torus.
double eta(const BumpLadder& ladder, LadderLevel level, double xi);

// int_T eta(xi) e(t xi) dxi for integer t; equals
// p^(t) [e(a t/q) - e((a/q + 3/(Nq)) t)], which vanishes at t = 0.
std::complex<double> eta_hat(const BumpLadder& ladder, LadderLevel level, double t);

enum class PieceKind { dyadic, core, maj, min, whole };

/// One piece of the multiplier decomposition.
///
/// dyadic(Q, l) sums eta_{l,a,q} and core(Q) sums the core bumps over a in
/// A_q and Q/2 < q <= Q, further restricted to q <= cap when cap > 0.
struct PieceSpec {
  PieceKind kind = PieceKind::whole;
  std::int64_t Q = 0;
  int l = 0;
  std::int64_t cap = 0;

  static PieceSpec dyadic(std::int64_t Q, int l, std::int64_t cap = 0) { return {PieceKind::dyadic, Q, l, cap}; }
  static PieceSpec core(std::int64_t Q, std::int64_t cap = 0) { return {PieceKind::core, Q, 0, cap}; }
  static PieceSpec maj() { return {PieceKind::maj, 0, 0, 0}; }
  static PieceSpec min() { return {PieceKind::min, 0, 0, 0}; }
  static PieceSpec whole() { return {PieceKind::whole, 0, 0, 0}; }

  bool is_block() const { return kind == PieceKind::dyadic || kind == PieceKind::core; }
  std::string label() const;
};

// Throws DomainError unless Q is a power of two, the block meets some q < N
// and (dyadic) some q in the block has l in its ladder.
void validate_piece(const PieceSpec& spec, std::int64_t N);

// Denominators of a block piece: Q/2 < q <= Q, q <= cap (if cap > 0), q < N.
std::vector<std::int64_t> block_denominators(const PieceSpec& spec, std::int64_t N);

// Blocks of the major-arc decomposition: every dyadic Q with Q/2 < floor(N/10),
// each capped at floor(N/10), with core(Q) and dyadic(Q, l) for every level
// some q in the block admits. Empty for N < 10.
std::vector<PieceSpec> decomposition_pieces(std::int64_t N);

// The one-dimensional weight of a block piece: sum over its (q, a) of eta at
// the piece's level, evaluated at xi_n.
double piece_weight(const PieceSpec& spec, double xi_n, std::int64_t N, int spline_order = kDefaultSplineOrder);

// Weight W of m^maj = m_N W; W = 1 on every arc I(q, N, a) with q <= N/10.
double major_weight(double xi_n, std::int64_t N, int spline_order = kDefaultSplineOrder);

// Evaluates the requested piece at xi. whole = m_N, maj = m_N W,
// min = m_N - maj, block pieces = m_N times their weight.
std::complex<double> piece_multiplier(const PieceSpec& spec, const TorusPoint& xi, const OperatorParams& params,
                                      int spline_order = kDefaultSplineOrder);

// Support intervals of every eta in the decomposition, on the torus. A dyadic
// piece vanishes near its center, so it contributes one interval per side.
struct SupportInterval {
  FareyFraction frac;
  LadderLevel level;
  bool shifted = false;
  double lo = 0.0;  // unreduced; lo < hi, hi - lo < 1
  double hi = 0.0;
};
std::vector<SupportInterval> eta_support_intervals(std::int64_t N, int spline_order = kDefaultSplineOrder);

// Open supports of eta across distinct fractions, and of dyadic levels
// l, l' of one fraction with |l - l'| >= 2, are disjoint.
bool eta_supports_disjoint(std::int64_t N, int spline_order = kDefaultSplineOrder);

}  // namespace paraboloid
