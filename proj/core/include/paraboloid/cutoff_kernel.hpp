#pragma once

#include <cstdint>
#include <vector>

#include "paraboloid/lattice.hpp"
#include "paraboloid/report.hpp"

namespace paraboloid {

enum class CutoffKind { sharp, smooth };

// C^{r-1} monotone ramp: 1 for u <= 0, 0 for u >= 1, and 1 - S_r(u) in
// between, where S_r is the degree 2r-1 smoothstep whose first r-1
// derivatives vanish at both ends. r = 3 is 1 - (6u^5 - 15u^4 + 10u^3).
double ramp(double u, int order);

/// The cutoff sigma_N : Z -> [0, 1].
///
/// sharp:  sigma(k) = 1 for 1 <= k <= N, 0 otherwise.
/// smooth: sigma(k) = ramp((|k| - N) / N), so that 1 on (-N, N), 0 outside
///         (-2N, 2N), and the discrete derivative s_k = sigma(k+1) - sigma(k)
///         satisfies N sup|s_k| <= C1 and N sum|s_{k+1} - s_k| <= C2.
class CutoffProfile {
 public:
  // Recorded constants for the default ramp (order 3).
  static constexpr double kSupDerivativeConstant = 2.0;
  static constexpr double kVariationConstant = 16.0;

  static CutoffProfile sharp(std::int64_t N);
  static CutoffProfile smooth(std::int64_t N, int ramp_order = 3);

  CutoffKind kind() const { return kind_; }
  std::int64_t scale() const { return N_; }
  int ramp_order() const { return ramp_order_; }

  double operator()(std::int64_t k) const;

  // Inclusive range of k outside of which sigma vanishes.
  std::int64_t support_lo() const { return kind_ == CutoffKind::sharp ? 1 : -2 * N_ + 1; }
  std::int64_t support_hi() const { return kind_ == CutoffKind::sharp ? N_ : 2 * N_ - 1; }
  std::int64_t support_size() const { return support_hi() - support_lo() + 1; }

  // sigma(support_lo() + i) for i in [0, support_size()).
  const std::vector<double>& values() const { return values_; }
  double l1_norm() const { return l1_norm_; }

 private:
  CutoffProfile(CutoffKind kind, std::int64_t N, int ramp_order);

  CutoffKind kind_;
  std::int64_t N_;
  int ramp_order_;
  std::vector<double> values_;
  double l1_norm_ = 0.0;
};

double cutoff_value(const CutoffProfile& profile, std::int64_t k);

// Reports N sup|s_k| and N TV(s); both are checked against the recorded
// constants. Throws DomainError for the sharp kind.
ExperimentReport cutoff_checks(const CutoffProfile& profile);

struct OperatorParams {
  int dim;
  std::int64_t N;
  CutoffProfile cutoff;

  static OperatorParams sharp(int dim, std::int64_t N) { return {dim, N, CutoffProfile::sharp(N)}; }
  static OperatorParams smooth(int dim, std::int64_t N, int ramp_order = 3) {
    return {dim, N, CutoffProfile::smooth(N, ramp_order)};
  }

  // Throws DomainError unless dim >= 2, N >= 1, cutoff.scale() == N and
  // (smooth) N >= 4.
  void validate() const;
  // N^{n-1}, the averaging normalization.
  double normalization() const;
};

// sum over k' of prod sigma(k_i) delta_{(k', |k'|^2)}. Throws CapacityError
// when the support would exceed the kernel point budget.
LatticeFunction paraboloid_kernel(const OperatorParams& params);

// Unnormalized average: sum_{k'} w(k') f(x + (k', |k'|^2)). For the sharp
// cutoff and integer-valued f the values are exact integers.
LatticeFunction paraboloid_sum(const LatticeFunction& f, const OperatorParams& params,
                               ConvolutionStrategy strategy = ConvolutionStrategy::direct);

// A f(x) = N^{-(n-1)} sum_{k'} w(k') f(x + (k', |k'|^2)); the convolution of f
// with the reflected kernel.
LatticeFunction average(const LatticeFunction& f, const OperatorParams& params,
                        ConvolutionStrategy strategy = ConvolutionStrategy::direct);

}  // namespace paraboloid
