#include "paraboloid/exp_sums.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>

#include "paraboloid/errors.hpp"
#include "paraboloid/parallel.hpp"
#include "paraboloid/rng.hpp"

namespace paraboloid {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

long double frac_l(long double x) { return x - std::floor(x); }

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double& c : coords_) c = reduce_mod1(c);
}

double reduce_mod1(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double torus_signed(double x) {
  double r = reduce_mod1(x);
  return r >= 0.5 ? r - 1.0 : r;
}

double torus_distance(double a, double b) { return std::abs(torus_signed(a - b)); }

std::complex<double> unit_phase(long double x) {
  // Quarter-turn reduction in extended precision; the residual angle is at
  // most pi/4, where double sin/cos are accurate to an ulp.
  const long double r4 = 4.0L * frac_l(x);
  const long double nearest = std::floor(r4 + 0.5L);
  const double angle = std::numbers::pi / 2.0 * static_cast<double>(r4 - nearest);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  switch (static_cast<int>(nearest) & 3) {
    case 0:
      return {c, s};
    case 1:
      return {-s, c};
    case 2:
      return {-c, -s};
    default:
      return {s, -c};
  }
}

std::complex<double> gauss_sum(double t, double y, const CutoffProfile& cutoff) {
  const long double tl = t;
  const long double yl = y;
  std::complex<double> acc{0.0, 0.0};
  const auto& vals = cutoff.values();
  for (std::int64_t k = cutoff.support_lo(); k <= cutoff.support_hi(); ++k) {
    const double w = vals[static_cast<std::size_t>(k - cutoff.support_lo())];
    if (w == 0.0) continue;
    const auto kl = static_cast<long double>(k);
    acc += w * unit_phase(frac_l(yl * kl) + frac_l(tl * kl * kl));
  }
  return acc;
}

std::complex<double> multiplier(const TorusPoint& xi, const OperatorParams& params) {
  params.validate();
  if (xi.dim() != static_cast<std::size_t>(params.dim)) throw DomainError("torus point dimension does not match n");
  const double t = xi[xi.dim() - 1];
  std::complex<double> m{1.0, 0.0};
  for (std::size_t i = 0; i + 1 < xi.dim(); ++i) m *= gauss_sum(t, xi[i], params.cutoff);
  return m;
}

struct GaussSupEvaluator::Impl {
  fftw_complex* buf = nullptr;
  fftw_plan plan = nullptr;
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

GaussSupEvaluator::GaussSupEvaluator(const CutoffProfile& cutoff, int oversample)
    : cutoff_(cutoff), impl_(std::make_unique<Impl>()) {
  if (oversample < 2) throw DomainError("oversample must be >= 2");
  grid_ = next_pow2(static_cast<std::size_t>(oversample) * static_cast<std::size_t>(cutoff.support_size()));
  std::lock_guard lock(planner_mutex());
  impl_->buf = fftw_alloc_complex(grid_);
  impl_->plan = fftw_plan_dft_1d(static_cast<int>(grid_), impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

GaussSupEvaluator::~GaussSupEvaluator() = default;

GaussSupEvaluator::Result GaussSupEvaluator::grid_sup(double t) {
  auto* buf = impl_->buf;
  std::fill(&buf[0][0], &buf[0][0] + 2 * grid_, 0.0);
  const long double tl = t;
  const auto M = static_cast<std::int64_t>(grid_);
  for (std::int64_t k = cutoff_.support_lo(); k <= cutoff_.support_hi(); ++k) {
    const double w = cutoff_(k);
    if (w == 0.0) continue;
    const auto kl = static_cast<long double>(k);
    const auto z = w * unit_phase(frac_l(tl * kl * kl));
    const auto slot = static_cast<std::size_t>(((k % M) + M) % M);
    buf[slot][0] = z.real();
    buf[slot][1] = z.imag();
  }
  fftw_execute(impl_->plan);

  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t j = 0; j < grid_; ++j) {
    const double a = std::hypot(buf[j][0], buf[j][1]);
    if (a > best_abs) {
      best_abs = a;
      best = j;
    }
  }
  return {best_abs, static_cast<double>(best) / static_cast<double>(grid_)};
}

GaussSupEvaluator::Result GaussSupEvaluator::refine(double t, double y0) {
  const double h = 1.0 / static_cast<double>(grid_);
  const auto f = [&](double y) { return std::abs(gauss_sum(t, y, cutoff_)); };
  double lo = y0 - h;
  double hi = y0 + h;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 24; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  Result r{f(y0), y0};
  if (f1 > r.value) r = {f1, x1};
  if (f2 > r.value) r = {f2, x2};
  r.y = reduce_mod1(r.y);
  return r;
}

GaussSupEvaluator::Result GaussSupEvaluator::sup_over_y(double t) { return refine(t, grid_sup(t).y); }

WeightedSup weighted_gauss_sup(const std::vector<double>& ts, const std::vector<double>& weights, int power,
                               const CutoffProfile& cutoff) {
  if (ts.size() != weights.size()) throw DomainError("ts and weights differ in length");
  if (power < 1) throw DomainError("power must be >= 1");
  WeightedSup out;
  if (ts.empty()) return out;

  const std::size_t workers = std::max<std::size_t>(1, std::min(worker_count(), ts.size()));
  const auto chunk = [&](std::size_t w) {
    return std::pair{ts.size() * w / workers, ts.size() * (w + 1) / workers};
  };
  std::vector<GaussSupEvaluator::Result> grid(ts.size());
  parallel_for(workers, [&](std::size_t w) {
    GaussSupEvaluator ev(cutoff);
    const auto [lo, hi] = chunk(w);
    for (std::size_t i = lo; i < hi; ++i) {
      grid[i] = weights[i] == 0.0 ? GaussSupEvaluator::Result{0.0, 0.0} : ev.grid_sup(ts[i]);
    }
  });
  std::vector<double> score(ts.size());
  double best_grid = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    score[i] = std::pow(grid[i].value, power) * std::abs(weights[i]);
    best_grid = std::max(best_grid, score[i]);
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (score[i] > 0.0 && score[i] >= 0.9 * best_grid) candidates.push_back(i);

  std::vector<GaussSupEvaluator::Result> polished(candidates.size());
  const std::size_t cworkers = std::max<std::size_t>(1, std::min(workers, candidates.size()));
  parallel_for(cworkers, [&](std::size_t w) {
    GaussSupEvaluator ev(cutoff);
    for (std::size_t j = candidates.size() * w / cworkers; j < candidates.size() * (w + 1) / cworkers; ++j) {
      polished[j] = ev.refine(ts[candidates[j]], grid[candidates[j]].y);
    }
  });
  out.refined = candidates.size();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const std::size_t i = candidates[j];
    const double v = std::pow(polished[j].value, power) * std::abs(weights[i]);
    if (v > out.value) out = {v, ts[i], polished[j].y, i, out.refined};
  }
  return out;
}

namespace {

struct Candidate {
  std::int64_t a;
  std::int64_t q;
  long double err;
};

bool certified(long double err, std::int64_t q, std::int64_t N) {
  return std::abs(err) * static_cast<long double>(q) * static_cast<long double>(N) <= 1.0L;
}

long double signed_err(double t, std::int64_t a, std::int64_t q) {
  long double e = static_cast<long double>(t) - static_cast<long double>(a) / static_cast<long double>(q);
  e -= std::round(e);
  return e;
}

// Closest certified fraction; ties go to the smaller denominator.
bool better(const Candidate& c, const std::optional<Candidate>& best) {
  if (!best) return true;
  const long double ec = std::abs(c.err);
  const long double eb = std::abs(best->err);
  return ec < eb || (ec == eb && c.q < best->q);
}

RationalApprox finish(double t, std::int64_t a, std::int64_t q) {
  a %= q;
  const std::int64_t g = std::gcd(a, q);
  a /= g;
  q /= g;
  if (q == 1) a = 0;
  return {a, q, static_cast<double>(signed_err(t, a, q))};
}

void check_input(double t, std::int64_t N) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("dirichlet_approx requires t in [0, 1)");
  if (N < 1) throw DomainError("dirichlet_approx requires N >= 1");
}

}  // namespace

RationalApprox dirichlet_approx_exhaustive(double t, std::int64_t N) {
  check_input(t, N);
  std::optional<Candidate> best;
  for (std::int64_t q = 1; q <= N; ++q) {
    const auto base = static_cast<std::int64_t>(std::floor(static_cast<long double>(t) * q));
    for (std::int64_t a = base; a <= base + 1; ++a) {
      if (std::gcd(a, q) != 1) continue;
      const Candidate c{a, q, signed_err(t, a, q)};
      if (certified(c.err, q, N) && better(c, best)) best = c;
    }
  }
  if (!best) throw ConvergenceError("no certified rational approximation found");
  return finish(t, best->a, best->q);
}

RationalApprox dirichlet_approx(double t, std::int64_t N) {
  check_input(t, N);
  // Every closest certified fraction is a best approximation of the first
  // kind, hence a convergent or an upper-half semiconvergent.
  std::optional<Candidate> best;
  const auto offer = [&](std::int64_t a, std::int64_t q) {
    const Candidate c{a, q, signed_err(t, a, q)};
    if (certified(c.err, q, N) && better(c, best)) best = c;
  };

  std::int64_t h1 = 1, k1 = 0, h2 = 0, k2 = 1;
  long double x = t;
  for (int step = 0; step < 64; ++step) {
    if (x > 4.0e18L) break;
    const auto a = static_cast<std::int64_t>(std::floor(x));
    if (k1 > 0) {
      for (std::int64_t j = std::max<std::int64_t>(1, (a + 1) / 2); j < a; ++j) {
        const std::int64_t q = j * k1 + k2;
        if (q > N) break;
        offer(j * h1 + h2, q);
      }
    }
    if (k1 > 0 && a > (N - k2) / k1) break;
    const std::int64_t h = a * h1 + h2;
    const std::int64_t k = a * k1 + k2;
    if (k > N) break;
    offer(h, k);
    h2 = h1;
    k2 = k1;
    h1 = h;
    k1 = k;
    const long double rest = x - static_cast<long double>(a);
    if (rest <= 0.0L) break;
    x = 1.0L / rest;
  }
  if (!best) return dirichlet_approx_exhaustive(t, N);
  return finish(t, best->a, best->q);
}

ExperimentReport gauss_bound_report(const OperatorParams& params, std::int64_t n_samples, std::uint64_t seed) {
  params.validate();
  if (params.cutoff.kind() != CutoffKind::smooth) throw DomainError("gauss_bound_report requires the smooth cutoff");
  if (params.N < 10) throw DomainError("gauss_bound_report requires N >= 10");
  if (n_samples < 1) throw DomainError("n_samples must be >= 1");
  const std::int64_t N = params.N;
  const std::int64_t qmax = N / 10;

  std::vector<std::pair<std::int64_t, std::int64_t>> arcs;
  for (std::int64_t q = 1; q <= qmax; ++q) {
    if (q == 1) {
      arcs.emplace_back(0, 1);
      continue;
    }
    for (std::int64_t a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1) arcs.emplace_back(a, q);
  }

  struct Sample {
    std::int64_t a, q;
    double offset;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(n_samples));
  Rng rng(seed, "gauss_bound");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool center = i < arcs.size();
    const auto& [a, q] = center ? arcs[i] : arcs[static_cast<std::size_t>(
                                                rng.uniform_int(0, static_cast<std::int64_t>(arcs.size()) - 1))];
    const double radius = 10.0 / (static_cast<double>(q) * static_cast<double>(N));
    double off = 0.0;
    if (!center) {
      do off = rng.uniform(-radius, radius);
      while (off == -radius);
    }
    samples[i] = {a, q, off};
  }

  std::vector<double> ts(samples.size());
  std::vector<double> weights(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    ts[i] = static_cast<double>(frac_l(static_cast<long double>(s.a) / static_cast<long double>(s.q) + s.offset));
    const double scale = s.offset == 0.0 ? static_cast<double>(N)
                                          : std::min(static_cast<double>(N), 1.0 / std::sqrt(std::abs(s.offset)));
    weights[i] = std::sqrt(static_cast<double>(s.q)) / scale;
  }
  const auto sup = weighted_gauss_sup(ts, weights, 1, params.cutoff);
  const std::size_t arg = sup.index;

  ExperimentReport r;
  r.name = "gauss_bound";
  r.param("n", std::int64_t{params.dim}).param("N", N).param("ramp_order", std::int64_t{params.cutoff.ramp_order()});
  r.samples = n_samples;
  r.seed = seed;
  r.constant = sup.value;
  r.value("max_ratio", sup.value)
      .value("argmax_q", static_cast<double>(samples[arg].q))
      .value("argmax_a", static_cast<double>(samples[arg].a))
      .value("argmax_offset", samples[arg].offset)
      .value("argmax_y", sup.y)
      .value("refined", static_cast<double>(sup.refined))
      .value("arcs", static_cast<double>(arcs.size()));
  r.check("finite", std::isfinite(sup.value), "empirical constant is finite");
  return r;
}

}  // namespace paraboloid
