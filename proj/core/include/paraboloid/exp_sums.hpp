#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "paraboloid/cutoff_kernel.hpp"
#include "paraboloid/report.hpp"

namespace paraboloid {

/// A point of T^n = [0,1)^n; coordinates are reduced mod 1 on construction.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

// x mod 1 in [0, 1).
double reduce_mod1(double x);
// Representative of x mod 1 in [-1/2, 1/2).
double torus_signed(double x);
// min over integer shifts of |a - b - m|.
double torus_distance(double a, double b);

// e(x) = exp(2 pi i x), with x reduced mod 1 in extended precision first.
std::complex<double> unit_phase(long double x);

// G(t, y) = sum_k sigma(k) e(y k + t k^2), summed exactly over the cutoff support.
std::complex<double> gauss_sum(double t, double y, const CutoffProfile& cutoff);

// m_N(xi) = prod_{i < n} G(xi_n, xi_i), the Fourier transform of the kernel
// under f^(xi) = sum_m f(m) e(m . xi).
std::complex<double> multiplier(const TorusPoint& xi, const OperatorParams& params);

/// sup over y of |G(t, y)| for many t.
///
/// Evaluates G(t, .) on an oversampled grid with one FFT, then polishes the
/// best grid point with a golden-section search on the exact sum. Owns FFTW
/// state: use one instance per thread.
class GaussSupEvaluator {
 public:
  explicit GaussSupEvaluator(const CutoffProfile& cutoff, int oversample = 8);
  ~GaussSupEvaluator();
  GaussSupEvaluator(const GaussSupEvaluator&) = delete;
  GaussSupEvaluator& operator=(const GaussSupEvaluator&) = delete;

  struct Result {
    double value;
    double y;
  };
  // Grid maximum followed by local refinement.
  Result sup_over_y(double t);
  // Grid maximum only; within a few percent of the true sup.
  Result grid_sup(double t);
  // Golden-section polish of |G(t, .)| on [y0 - h, y0 + h], h the grid step.
  Result refine(double t, double y0);
  std::size_t grid_size() const { return grid_; }

 private:
  struct Impl;
  const CutoffProfile& cutoff_;
  std::size_t grid_;
  std::unique_ptr<Impl> impl_;
};

struct WeightedSup {
  double value = 0.0;
  double t = 0.0;
  double y = 0.0;
  std::size_t index = 0;    // position of the maximizer in ts
  std::size_t refined = 0;  // number of t values polished
};

// max_i (sup_y |G(ts[i], y)|)^power |weights[i]|. Every t whose grid score is
// within 10% of the best grid score is refined.
WeightedSup weighted_gauss_sup(const std::vector<double>& ts, const std::vector<double>& weights, int power,
                               const CutoffProfile& cutoff);

struct RationalApprox {
  std::int64_t a = 0;
  std::int64_t q = 1;
  double err = 0.0;  // torus-signed t - a/q
};

// (a, q) in lowest terms with q <= N and |t - a/q|_T <= 1/(qN), from the
// continued-fraction convergents of t; 1/1 is reported as 0/1. Falls back to
// an exhaustive scan if rounding ever breaks the certificate. Requires t in
// [0, 1) and N >= 1.
RationalApprox dirichlet_approx(double t, std::int64_t N);

// Smallest q <= N admitting an a with |t - a/q|_T <= 1/(qN).
RationalApprox dirichlet_approx_exhaustive(double t, std::int64_t N);

// Empirical constant in |G(t,y)| <~ q^{-1/2} min{N, |t - a/q|^{-1/2}} over
// seeded samples t near the major-arc centers a/q, q <= N/10, each taken at
// its worst y (sup over y as in weighted_gauss_sup). One sample per arc sits
// exactly at t = a/q. Requires the smooth cutoff and N >= 10.
ExperimentReport gauss_bound_report(const OperatorParams& params, std::int64_t n_samples, std::uint64_t seed);

}  // namespace paraboloid
