#include "paraboloid/cutoff_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paraboloid/errors.hpp"

namespace paraboloid {
namespace {

constexpr std::int64_t kMaxKernelPoints = std::int64_t{1} << 26;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double smoothstep(double u, int order) {
  const int r = order;
  double acc = 0.0;
  double power = 1.0;
  for (int j = 0; j < r; ++j) {
    acc += binomial(r - 1 + j, j) * binomial(2 * r - 1, r - 1 - j) * power;
    power *= -u;
  }
  return std::pow(u, r) * acc;
}

// max |S_r'| = S_r'(1/2) = (2r-1)! / ((r-1)!^2 4^{r-1}).
double smoothstep_peak_slope(int order) {
  double v = static_cast<double>(2 * order - 1);
  for (int i = 1; i < order; ++i) v *= static_cast<double>(order - 1 + i) / static_cast<double>(i) / 4.0;
  return v;
}

}  // namespace

double ramp(double u, int order) {
  if (order < 1) throw DomainError("ramp order must be >= 1");
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  // Symmetric evaluation keeps the two halves exact mirrors: ramp(1-u) = 1 - ramp(u).
  if (u > 0.5) return smoothstep(1.0 - u, order);
  return 1.0 - smoothstep(u, order);
}

CutoffProfile::CutoffProfile(CutoffKind kind, std::int64_t N, int ramp_order)
    : kind_(kind), N_(N), ramp_order_(ramp_order) {
  if (N < 1) throw DomainError("cutoff scale N must be >= 1");
  if (ramp_order < 1) throw DomainError("ramp order must be >= 1");
  values_.resize(static_cast<std::size_t>(support_size()));
  for (std::int64_t k = support_lo(); k <= support_hi(); ++k) {
    double v = 1.0;
    if (kind_ == CutoffKind::smooth) {
      const std::int64_t excess = (k < 0 ? -k : k) - N_;
      v = ramp(static_cast<double>(excess) / static_cast<double>(N_), ramp_order_);
    }
    values_[static_cast<std::size_t>(k - support_lo())] = v;
  }
  for (double v : values_) l1_norm_ += v;
}

CutoffProfile CutoffProfile::sharp(std::int64_t N) { return CutoffProfile(CutoffKind::sharp, N, 1); }

CutoffProfile CutoffProfile::smooth(std::int64_t N, int ramp_order) {
  return CutoffProfile(CutoffKind::smooth, N, ramp_order);
}

double CutoffProfile::operator()(std::int64_t k) const {
  if (k < support_lo() || k > support_hi()) return 0.0;
  return values_[static_cast<std::size_t>(k - support_lo())];
}

double cutoff_value(const CutoffProfile& profile, std::int64_t k) { return profile(k); }

ExperimentReport cutoff_checks(const CutoffProfile& profile) {
  if (profile.kind() != CutoffKind::smooth) {
    throw DomainError("cutoff_checks requires the smooth cutoff (the sharp one has O(1) variation)");
  }
  const std::int64_t N = profile.scale();
  const double peak = smoothstep_peak_slope(profile.ramp_order());
  const double c1 = std::max(CutoffProfile::kSupDerivativeConstant, peak);
  const double c2 = std::max(CutoffProfile::kVariationConstant, 8.0 * peak);

  double sup = 0.0;
  double variation = 0.0;
  const std::int64_t lo = profile.support_lo() - 2;
  const std::int64_t hi = profile.support_hi() + 2;
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double s = profile(k + 1) - profile(k);
    const double s_next = profile(k + 2) - profile(k + 1);
    sup = std::max(sup, std::abs(s));
    variation += std::abs(s_next - s);
  }
  const double nd = static_cast<double>(N);

  ExperimentReport r;
  r.name = "cutoff_checks";
  r.param("N", N).param("ramp_order", std::int64_t{profile.ramp_order()});
  r.samples = hi - lo + 1;
  r.constant = nd * sup;
  r.value("N_sup_derivative", nd * sup)
      .value("N_total_variation", nd * variation)
      .value("C1", c1)
      .value("C2", c2)
      .value("l1_norm_over_N", profile.l1_norm() / nd);
  r.check("sup_derivative_bound", nd * sup <= c1, "N sup|s_k| <= C1");
  r.check("total_variation_bound", nd * variation <= c2, "N sum|s_{k+1}-s_k| <= C2");
  r.check("sandwich", profile(N - 1) == 1.0 && profile(-(N - 1)) == 1.0 && profile(2 * N) == 0.0 &&
                          profile(-2 * N) == 0.0,
          "1_(-N,N) <= sigma <= 1_(-2N,2N)");
  return r;
}

void OperatorParams::validate() const {
  if (dim < 2) throw DomainError("ambient dimension n must be >= 2");
  if (N < 1) throw DomainError("scale N must be >= 1");
  if (cutoff.scale() != N) throw DomainError("cutoff scale does not match N");
  if (cutoff.kind() == CutoffKind::smooth && N < 4) throw DomainError("smooth cutoff requires N >= 4");
}

double OperatorParams::normalization() const { return std::pow(static_cast<double>(N), dim - 1); }

LatticeFunction paraboloid_kernel(const OperatorParams& params) {
  params.validate();
  const auto& sigma = params.cutoff;
  const int free_axes = params.dim - 1;
  const std::int64_t side = sigma.support_size();
  std::int64_t count = 1;
  for (int i = 0; i < free_axes; ++i) {
    if (__builtin_mul_overflow(count, side, &count) || count > kMaxKernelPoints) {
      throw CapacityError("paraboloid kernel support exceeds " + std::to_string(kMaxKernelPoints) + " points");
    }
  }

  std::vector<LatticeFunction::Entry> entries;
  entries.reserve(static_cast<std::size_t>(count));
  std::vector<std::int64_t> k(static_cast<std::size_t>(free_axes), sigma.support_lo());
  for (std::int64_t idx = 0; idx < count; ++idx) {
    double w = 1.0;
    std::int64_t sq = 0;
    std::vector<std::int64_t> coords(static_cast<std::size_t>(params.dim));
    for (int i = 0; i < free_axes; ++i) {
      w *= sigma(k[static_cast<std::size_t>(i)]);
      sq += k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)];
      coords[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)];
    }
    coords.back() = sq;
    if (w != 0.0) entries.push_back({LatticePoint(std::move(coords)), Amplitude{w, 0.0}});
    for (int i = free_axes; i-- > 0;) {
      auto& ki = k[static_cast<std::size_t>(i)];
      if (++ki <= sigma.support_hi()) break;
      ki = sigma.support_lo();
    }
  }
  return LatticeFunction::from_entries(static_cast<std::size_t>(params.dim), std::move(entries));
}

LatticeFunction paraboloid_sum(const LatticeFunction& f, const OperatorParams& params,
                               ConvolutionStrategy strategy) {
  params.validate();
  if (f.dim() != static_cast<std::size_t>(params.dim)) throw DomainError("function dimension does not match n");
  return convolve(reflect(paraboloid_kernel(params)), f, strategy);
}

LatticeFunction average(const LatticeFunction& f, const OperatorParams& params, ConvolutionStrategy strategy) {
  return paraboloid_sum(f, params, strategy).divided(params.normalization());
}

}  // namespace paraboloid
