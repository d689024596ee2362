#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paraboloid/cutoff_kernel.hpp"
#include "paraboloid/lattice.hpp"
#include "paraboloid/report.hpp"

namespace paraboloid {

/// Exponent p in (1, 2], its conjugate p', and the target exponent q.
struct ExponentPair {
  double p = 2.0;
  double p_prime = 2.0;
  double q = 2.0;

  // q defaults to p'. Throws DomainError unless 1 < p <= 2.
  static ExponentPair from_p(double p);
  static ExponentPair from_p(double p, double q);
  // (n + 3) / (n + 1), the smallest p of the improving range.
  static double sharp_threshold(int n) { return (n + 3.0) / (n + 1.0); }
};

// p / (p - 1), with 1 -> infinity.
double conjugate_exponent(double p);

// -(n+1)(2/p - 1), the growth exponent of the l^p -> l^p' norm.
double theorem_exponent(int n, double p);
// -(n-1)/p, the exponent of the delta family.
double delta_exponent(int n, double p);

struct ScalingFit {
  std::vector<double> Ns;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  double target = 0.0;
  double residual = 0.0;  // |slope - target|
};

// Least squares of log(value) on log(N). Throws DomainError with fewer than
// 4 scales or a nonpositive value.
ScalingFit fit_scaling(const std::vector<double>& Ns, const std::vector<double>& values, double target);

enum class RatioSource { box, delta, ascent, l2 };
RatioSource parse_source(const std::string& name);
std::string source_name(RatioSource source);

// ||A||_{l^1 -> l^inf} = N^{-(n-1)} sup |K|; the delta at the origin attains it.
double norm_l1_linf(const OperatorParams& params);

struct L2Norm {
  double value = 0.0;        // N^{-(n-1)} sup |m_N|
  double argmax_t = 0.0;     // xi_n of the maximizer
  double argmax_y = 0.0;     // common xi_i of the maximizer
  double certificate = 0.0;  // Rayleigh quotient of the wave packet (0 if skipped)
  bool certified = false;    // certificate >= 0.8 value
  bool certificate_skipped = false;
};

// sup over a grid of step 1/(resolution N^2) in xi_n, refined near the best
// points. The certificate is ||A f||_2 / ||f||_2 for f(x) = e(x.xi*) times a
// sin^2 window of widths 8N (free axes) and 8N^2 (last axis); it is skipped
// when the window exceeds max_packet_points.
L2Norm norm_l2_l2(const OperatorParams& params, int resolution = 8, std::int64_t max_packet_points = 1 << 22);

// ||A f||_2 / ||f||_2.
double rayleigh_quotient(const LatticeFunction& f, const OperatorParams& params);

// Rayleigh quotients of seeded random f (complex Gaussian amplitudes on a
// box of side 2N, and N^2 + 1 on the last axis), checked against bound.
ExperimentReport random_rayleigh_report(const OperatorParams& params, double bound, std::int64_t trials,
                                        std::uint64_t seed);

// f = 1 on {1..2N}^{n-1} x {1..nN^2}. Values of A f are integer counts over N^{n-1}.
LatticeFunction box_extremizer(const OperatorParams& params);

// Exact ||A f||_{p'} / ||f||_p for the box extremizer: the counts are tallied
// in integers and converted to floating point only in the final power sum.
// Requires the sharp cutoff and 1 <= p <= 2.
double box_extremizer_ratio(const OperatorParams& params, double p);

// ||A delta||_{p'} / ||delta||_p = N^{-(n-1)/p}, measured from A delta.
// Requires the sharp cutoff and 1 <= p <= 2.
double delta_extremizer_ratio(const OperatorParams& params, double p);

// A f = 1 on {1..N}^{n-1} x {1..N^2} for the box extremizer.
ExperimentReport box_extremizer_check(const OperatorParams& params);

// A delta(-k', -|k'|^2) = N^{-(n-1)} for every k' in [1, N]^{n-1}.
ExperimentReport delta_extremizer_check(const OperatorParams& params);

struct AscentResult {
  double best = 0.0;
  double start = 0.0;               // best start ratio (box or delta)
  std::vector<double> trajectory;   // best ratio after each iteration
  std::int64_t accepted = 0;
  LatticeFunction best_f;
};

// Lower bound for ||A||_{p -> p'} by coordinate ascent over nonnegative f in
// the window [-N, 3N)^{n-1} x [-4N^2, 4N^2), starting from the box and delta
// extremizers and a random start, with multiplicative perturbations.
// Deterministic given the seed. Requires 1 < p <= 2 and iters >= 1.
AscentResult random_ascent_lower_bound(const OperatorParams& params, double p, std::uint64_t seed,
                                       std::int64_t iters);

// Values of the source ratio for each N (sharp cutoff) and their log-log fit.
// Target: -(n-1)/p for delta, -(n+1)(2/p - 1) otherwise.
ScalingFit scaling_fit(int n, const std::vector<std::int64_t>& Ns, double p, RatioSource source,
                       std::uint64_t seed = 1, std::int64_t ascent_iters = 20000);

// For each shift h in turn, g <- g + g(. + h) starting from g = f, with
// ||g||_p and ||A g||_q. When the supports of g, g(. + h) and of A g,
// (A g)(. + h) are disjoint, the power sums must exactly double; each such
// step is a check. Overlapping shifts are reported, not failed.
ExperimentReport two_bump_separation_probe(const LatticeFunction& f, const std::vector<LatticePoint>& shifts,
                                           double p, double q, const OperatorParams& params);

// box ratio <= norm_l1_linf^{2/p - 1} norm_l2_l2^{2 - 2/p} (1 + 1e-9).
ExperimentReport interpolation_check(const OperatorParams& params, double p);

}  // namespace paraboloid
