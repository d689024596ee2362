#include "paraboloid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

#include "paraboloid/errors.hpp"
#include "paraboloid/exp_sums.hpp"
#include "paraboloid/parallel.hpp"
#include "paraboloid/rng.hpp"

namespace paraboloid {
namespace {

void require_sharp(const OperatorParams& params, const char* what) {
  params.validate();
  if (params.cutoff.kind() != CutoffKind::sharp) throw DomainError(std::string(what) + " requires the sharp cutoff");
}

void require_p(double p, bool allow_one) {
  if (!(p <= 2.0) || !(allow_one ? p >= 1.0 : p > 1.0)) {
    throw DomainError(allow_one ? "p must lie in [1, 2]" : "p must lie in (1, 2]");
  }
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Neumaier-compensated sum.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool supports_disjoint(const LatticeFunction& f, const LatticeFunction& g) {
  const auto a = f.entries();
  const auto b = g.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].point == b[j].point) return false;
    if (a[i].point < b[j].point) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ExponentPair ExponentPair::from_p(double p) { return from_p(p, conjugate_exponent(p)); }

ExponentPair ExponentPair::from_p(double p, double q) {
  require_p(p, false);
  return {p, conjugate_exponent(p), q};
}

double conjugate_exponent(double p) {
  if (!(p >= 1.0)) throw DomainError("exponent must be >= 1");
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double theorem_exponent(int n, double p) { return -(n + 1.0) * (2.0 / p - 1.0); }
double delta_exponent(int n, double p) { return -(n - 1.0) / p; }

ScalingFit fit_scaling(const std::vector<double>& Ns, const std::vector<double>& values, double target) {
  if (Ns.size() != values.size()) throw DomainError("scales and values differ in length");
  if (Ns.size() < 4) throw DomainError("a scaling fit needs at least 4 scales");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (!(Ns[i] > 0) || !(values[i] > 0)) throw DomainError("scaling fit needs positive scales and values");
    sx += std::log(Ns[i]);
    sy += std::log(values[i]);
  }
  const double k = static_cast<double>(Ns.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const double dx = std::log(Ns[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  if (sxx == 0.0) throw DomainError("scaling fit needs distinct scales");
  ScalingFit fit{Ns, values};
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.target = target;
  fit.residual = std::abs(fit.slope - target);
  return fit;
}

RatioSource parse_source(const std::string& name) {
  if (name == "box") return RatioSource::box;
  if (name == "delta") return RatioSource::delta;
  if (name == "ascent") return RatioSource::ascent;
  if (name == "l2") return RatioSource::l2;
  throw DomainError("unknown ratio source '" + name + "' (box, delta, ascent, l2)");
}

std::string source_name(RatioSource source) {
  switch (source) {
    case RatioSource::box:
      return "box";
    case RatioSource::delta:
      return "delta";
    case RatioSource::ascent:
      return "ascent";
    case RatioSource::l2:
      return "l2";
  }
  return "?";
}

double norm_l1_linf(const OperatorParams& params) {
  params.validate();
  const auto& vals = params.cutoff.values();
  const double peak = *std::max_element(vals.begin(), vals.end());
  return std::pow(peak, params.dim - 1) / params.normalization();
}

L2Norm norm_l2_l2(const OperatorParams& params, int resolution, std::int64_t max_packet_points) {
  params.validate();
  if (resolution < 1) throw DomainError("resolution must be >= 1");
  const std::int64_t N = params.N;
  const std::int64_t G = static_cast<std::int64_t>(resolution) * N * N;
  std::vector<double> ts(static_cast<std::size_t>(G));
  for (std::int64_t k = 0; k < G; ++k) ts[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(G);
  const std::vector<double> ws(ts.size(), 1.0);
  const auto sup = weighted_gauss_sup(ts, ws, params.dim - 1, params.cutoff);

  L2Norm out;
  out.value = sup.value / params.normalization();
  out.argmax_t = sup.t;
  out.argmax_y = sup.y;

  const int free_axes = params.dim - 1;
  const std::int64_t wf = 8 * N;
  const std::int64_t wl = 8 * N * N;
  const double points = std::pow(static_cast<double>(wf), free_axes) * static_cast<double>(wl);
  if (points > static_cast<double>(max_packet_points)) {
    out.certificate_skipped = true;
    return out;
  }
  std::vector<AxisRange> axes;
  for (int i = 0; i < free_axes; ++i) axes.push_back({0, wf - 1});
  axes.push_back({0, wl - 1});
  const Box box(axes);
  const auto volume = box.volume();
  std::vector<Amplitude> values(static_cast<std::size_t>(volume));
  const auto window = [](std::int64_t x, std::int64_t w) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(x + 1) / static_cast<double>(w + 1));
    return s * s;
  };
  for (std::int64_t i = 0; i < volume; ++i) {
    const auto x = box.point_at(i);
    double amp = 1.0;
    long double phase = 0.0L;
    for (int d = 0; d < free_axes; ++d) {
      amp *= window(x[static_cast<std::size_t>(d)], wf);
      phase += static_cast<long double>(x[static_cast<std::size_t>(d)]) * sup.y;
    }
    amp *= window(x[static_cast<std::size_t>(free_axes)], wl);
    phase += static_cast<long double>(x[static_cast<std::size_t>(free_axes)]) * sup.t;
    values[static_cast<std::size_t>(i)] = amp * unit_phase(phase);
  }
  const auto f = LatticeFunction::from_dense(box, std::move(values));
  out.certificate = rayleigh_quotient(f, params);
  out.certified = out.certificate >= 0.8 * out.value;
  return out;
}

double rayleigh_quotient(const LatticeFunction& f, const OperatorParams& params) {
  const double denom = lp_power_sum(f, 2.0);
  if (denom == 0.0) throw DomainError("Rayleigh quotient of the zero function");
  const auto Af = average(f, params, ConvolutionStrategy::automatic);
  return std::sqrt(lp_power_sum(Af, 2.0) / denom);
}

ExperimentReport random_rayleigh_report(const OperatorParams& params, double bound, std::int64_t trials,
                                        std::uint64_t seed) {
  params.validate();
  if (trials < 1) throw DomainError("trials must be >= 1");
  const int free_axes = params.dim - 1;
  std::vector<AxisRange> axes;
  for (int i = 0; i < free_axes; ++i) axes.push_back({0, 2 * params.N - 1});
  axes.push_back({0, params.N * params.N});
  const Box box(axes);

  std::vector<double> q(static_cast<std::size_t>(trials));
  std::vector<std::uint64_t> seeds(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) seeds[i] = stream_seed(seed, "rayleigh/" + std::to_string(i));
  parallel_for(q.size(), [&](std::size_t i) {
    Rng rng(seeds[i]);
    std::vector<Amplitude> values(static_cast<std::size_t>(box.volume()));
    for (auto& v : values) v = {rng.normal(), rng.normal()};
    q[i] = rayleigh_quotient(LatticeFunction::from_dense(box, std::move(values)), params);
  });
  const double worst = *std::max_element(q.begin(), q.end());

  ExperimentReport r;
  r.name = "random_rayleigh";
  r.param("n", std::int64_t{params.dim}).param("N", params.N);
  r.samples = trials;
  r.seed = seed;
  r.constant = worst;
  r.value("max_quotient", worst).value("bound", bound);
  r.check("below_l2_norm", worst <= bound + 1e-9, "every quotient <= norm_l2_l2 + 1e-9");
  return r;
}

LatticeFunction box_extremizer(const OperatorParams& params) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.dim);
  LatticePoint lo = LatticePoint::origin(n);
  LatticePoint hi = LatticePoint::origin(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    lo[i] = 1;
    hi[i] = 2 * params.N;
  }
  lo[n - 1] = 1;
  hi[n - 1] = static_cast<std::int64_t>(n) * params.N * params.N;
  return box_indicator(lo, hi);
}

double box_extremizer_ratio(const OperatorParams& params, double p) {
  require_sharp(params, "box_extremizer_ratio");
  require_p(p, true);
  const std::int64_t N = params.N;
  const int free_axes = params.dim - 1;
  const std::int64_t top = static_cast<std::int64_t>(params.dim) * N * N;
  const std::int64_t smax = static_cast<std::int64_t>(free_axes) * N * N;
  const double work = std::pow(2.0 * N - 1.0, free_axes) * static_cast<double>(top + smax);
  if (work > 2e9) throw CapacityError("box extremizer count exceeds the work budget");

  // On a free axis, x_i + k_i in [1, 2N] for k_i in [max(1, 1 - x_i), min(N, 2N - x_i)];
  // x_i ranges over [1 - N, 2N - 1]. Group x_i by that interval.
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> classes;
  for (std::int64_t x = 1 - N; x <= 2 * N - 1; ++x) ++classes[{std::max<std::int64_t>(1, 1 - x), std::min(N, 2 * N - x)}];
  std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, std::int64_t>> cls(classes.begin(), classes.end());

  std::vector<std::int64_t> hist(static_cast<std::size_t>(ipow(N, free_axes)) + 1, 0);
  std::vector<std::size_t> pick(static_cast<std::size_t>(free_axes), 0);
  while (true) {
    // Multiset of |k'|^2 over the product of intervals.
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(smax) + 1, 0);
    cnt[0] = 1;
    std::int64_t mult = 1;
    std::int64_t reach = 0;
    for (int d = 0; d < free_axes; ++d) {
      const auto& [iv, m] = cls[pick[static_cast<std::size_t>(d)]];
      mult *= m;
      std::vector<std::int64_t> next(cnt.size(), 0);
      for (std::int64_t s = 0; s <= reach; ++s) {
        if (!cnt[static_cast<std::size_t>(s)]) continue;
        for (std::int64_t k = iv.first; k <= iv.second; ++k) next[static_cast<std::size_t>(s + k * k)] += cnt[static_cast<std::size_t>(s)];
      }
      reach += iv.second * iv.second;
      cnt = std::move(next);
    }
    std::vector<std::int64_t> prefix(cnt.size() + 1, 0);
    for (std::size_t s = 0; s < cnt.size(); ++s) prefix[s + 1] = prefix[s] + cnt[s];
    const auto upto = [&](std::int64_t v) {  // #{s <= v}
      if (v < 0) return std::int64_t{0};
      return prefix[static_cast<std::size_t>(std::min(v, smax)) + 1];
    };
    for (std::int64_t xn = 1 - smax; xn <= top - 1; ++xn) {
      const std::int64_t c = upto(top - xn) - upto(-xn);
      if (c > 0) hist[static_cast<std::size_t>(c)] += mult;
    }
    std::size_t d = 0;
    while (d < pick.size() && ++pick[d] == cls.size()) pick[d++] = 0;
    if (d == pick.size()) break;
  }

  const double norm = params.normalization();
  const double f_mass = std::pow(2.0, free_axes) * params.dim * std::pow(static_cast<double>(N), params.dim + 1);
  const double fp = std::pow(f_mass, 1.0 / p);
  if (p == 1.0) {
    std::int64_t cmax = 0;
    for (std::size_t c = 0; c < hist.size(); ++c)
      if (hist[c]) cmax = static_cast<std::int64_t>(c);
    return static_cast<double>(cmax) / norm / fp;
  }
  const double pp = conjugate_exponent(p);
  Accumulator acc;
  for (std::size_t c = 1; c < hist.size(); ++c)
    if (hist[c]) acc.add(static_cast<double>(hist[c]) * std::pow(static_cast<double>(c), pp));
  return std::pow(acc.value(), 1.0 / pp) / norm / fp;
}

double delta_extremizer_ratio(const OperatorParams& params, double p) {
  require_sharp(params, "delta_extremizer_ratio");
  require_p(p, true);
  const auto Ad = average(delta(LatticePoint::origin(static_cast<std::size_t>(params.dim))), params);
  return lp_norm(Ad, conjugate_exponent(p));
}

ExperimentReport box_extremizer_check(const OperatorParams& params) {
  require_sharp(params, "box_extremizer_check");
  const std::int64_t N = params.N;
  const auto n = static_cast<std::size_t>(params.dim);
  const Box support = box_extremizer(params).support_box();
  std::vector<LatticePoint> taps;
  paraboloid_kernel(params).for_each([&](const LatticePoint& k, Amplitude w) {
    if (w != Amplitude{1.0, 0.0}) throw InvariantError("sharp kernel weight differs from 1");
    taps.push_back(k);
  });
  // A f(x) = N^{-(n-1)} #{k : x + k in the box}; f = 1 there exactly when the
  // count is N^{n-1}.
  const auto full = static_cast<std::int64_t>(taps.size());
  std::vector<AxisRange> axes(n - 1, AxisRange{1, N});
  axes.push_back({1, N * N});
  const Box region(axes);
  std::int64_t bad = 0;
  LatticePoint y = LatticePoint::origin(n);
  for (std::int64_t i = 0; i < region.volume(); ++i) {
    const auto x = region.point_at(i);
    std::int64_t count = 0;
    for (const auto& k : taps) {
      for (std::size_t d = 0; d < n; ++d) y[d] = x[d] + k[d];
      count += support.contains(y);
    }
    if (count != full || full != ipow(N, params.dim - 1)) ++bad;
  }

  ExperimentReport r;
  r.name = "box_extremizer_check";
  r.param("n", std::int64_t{params.dim}).param("N", N);
  r.samples = region.volume();
  r.constant = static_cast<double>(bad);
  r.value("points_not_one", static_cast<double>(bad));
  r.check("A_box_equals_one", bad == 0, "A f = 1 on {1..N}^{n-1} x {1..N^2}");
  return r;
}

ExperimentReport delta_extremizer_check(const OperatorParams& params) {
  require_sharp(params, "delta_extremizer_check");
  const std::int64_t N = params.N;
  const auto n = static_cast<std::size_t>(params.dim);
  const auto Ad = average(delta(LatticePoint::origin(n)), params, ConvolutionStrategy::direct);
  const double expected = 1.0 / params.normalization();
  const Box ks(std::vector<AxisRange>(n - 1, AxisRange{1, N}));
  std::int64_t bad = 0;
  for (std::int64_t i = 0; i < ks.volume(); ++i) {
    const auto k = ks.point_at(i);
    LatticePoint x = LatticePoint::origin(n);
    std::int64_t s = 0;
    for (std::size_t d = 0; d + 1 < n; ++d) {
      x[d] = -k[d];
      s += k[d] * k[d];
    }
    x[n - 1] = -s;
    if (Ad(x) != Amplitude{expected, 0.0}) ++bad;
  }
  const bool support_ok = static_cast<std::int64_t>(Ad.entries().size()) == ks.volume();

  ExperimentReport r;
  r.name = "delta_extremizer_check";
  r.param("n", std::int64_t{params.dim}).param("N", N);
  r.samples = ks.volume();
  r.constant = static_cast<double>(bad);
  r.value("points_wrong", static_cast<double>(bad)).value("expected", expected);
  r.check("A_delta_exact", bad == 0, "A delta(-k', -|k'|^2) = N^{-(n-1)}");
  r.check("support_size", support_ok, "A delta has exactly N^{n-1} nonzero points");
  return r;
}

AscentResult random_ascent_lower_bound(const OperatorParams& params, double p, std::uint64_t seed,
                                       std::int64_t iters) {
  require_sharp(params, "random_ascent_lower_bound");
  require_p(p, false);
  if (iters < 1) throw DomainError("iters must be >= 1");
  const std::int64_t N = params.N;
  const int free_axes = params.dim - 1;
  const auto n = static_cast<std::size_t>(params.dim);
  const double pp = conjugate_exponent(p);

  std::vector<AxisRange> waxes(n - 1, AxisRange{-N, 3 * N - 1});
  waxes.push_back({-4 * N * N, 4 * N * N - 1});
  const Box window(waxes);
  // y = x - k with k_i in [1, N], k_n = |k'|^2 in [n-1, (n-1) N^2].
  std::vector<AxisRange> yaxes(n - 1, AxisRange{-2 * N, 3 * N - 2});
  yaxes.push_back({-4 * N * N - free_axes * N * N, 4 * N * N - 1 - free_axes});
  const Box ybox(yaxes);
  if (window.volume() + ybox.volume() > (std::int64_t{1} << 25)) {
    throw CapacityError("ascent window exceeds the dense element budget");
  }

  std::vector<std::int64_t> offsets;
  {
    const Box ks(std::vector<AxisRange>(n - 1, AxisRange{1, N}));
    std::vector<std::int64_t> stride(n, 1);
    for (std::size_t d = n - 1; d-- > 0;) stride[d] = stride[d + 1] * ybox.axis(d + 1).length();
    for (std::int64_t i = 0; i < ks.volume(); ++i) {
      const auto k = ks.point_at(i);
      std::int64_t off = 0, s = 0;
      for (std::size_t d = 0; d + 1 < n; ++d) {
        off += k[d] * stride[d];
        s += k[d] * k[d];
      }
      offsets.push_back(off + s);
    }
  }
  const double w = 1.0 / params.normalization();
  const auto ybase = [&](std::int64_t widx) { return ybox.linear_index(window.point_at(widx)); };

  struct State {
    std::vector<double> f, Af;
    double sf = 0.0, sa = 0.0;
  };
  const auto power_sums = [&](State& st) {
    Accumulator a, b;
    for (double v : st.f)
      if (v != 0.0) a.add(std::pow(v, p));
    for (double v : st.Af)
      if (v != 0.0) b.add(std::pow(v, pp));
    st.sf = a.value();
    st.sa = b.value();
  };
  const auto ratio_of = [&](const State& st) { return std::pow(st.sa, 1.0 / pp) / std::pow(st.sf, 1.0 / p); };
  const auto build = [&](const std::vector<double>& f) {
    State st{f, std::vector<double>(static_cast<std::size_t>(ybox.volume()), 0.0)};
    for (std::int64_t i = 0; i < window.volume(); ++i) {
      const double v = st.f[static_cast<std::size_t>(i)];
      if (v == 0.0) continue;
      const std::int64_t base = ybase(i);
      for (std::int64_t off : offsets) st.Af[static_cast<std::size_t>(base - off)] += v * w;
    }
    power_sums(st);
    return st;
  };

  AscentResult out;
  out.start = std::max(box_extremizer_ratio(params, p), delta_extremizer_ratio(params, p));
  out.best = out.start;

  std::vector<std::vector<double>> starts;
  const auto wv = static_cast<std::size_t>(window.volume());
  const auto box_f = box_extremizer(params);
  bool inside = true;
  for (std::size_t d = 0; d < n; ++d) {
    const auto& a = box_f.support_box().axis(d);
    inside = inside && window.axis(d).contains(a.lo) && window.axis(d).contains(a.hi);
  }
  if (inside) {
    std::vector<double> f(wv, 0.0);
    box_f.for_each([&](const LatticePoint& x, Amplitude v) { f[static_cast<std::size_t>(window.linear_index(x))] = v.real(); });
    starts.push_back(std::move(f));
  }
  {
    std::vector<double> f(wv, 0.0);
    f[static_cast<std::size_t>(window.linear_index(LatticePoint::origin(n)))] = 1.0;
    starts.push_back(std::move(f));
  }
  Rng rng(seed, "ascent");
  {
    std::vector<double> f(wv, 0.0);
    for (std::int64_t i = 0; i < window.volume(); ++i) {
      const auto x = window.point_at(i);
      bool in = true;
      for (std::size_t d = 0; d + 1 < n; ++d) in = in && x[d] >= 0 && x[d] < N;
      in = in && x[n - 1] >= 0 && x[n - 1] < N * N;
      if (in) f[static_cast<std::size_t>(i)] = rng.uniform();
    }
    starts.push_back(std::move(f));
  }

  const std::int64_t per_run = std::max<std::int64_t>(1, iters / static_cast<std::int64_t>(starts.size()));
  std::int64_t done = 0;
  double running = 0.0;
  std::vector<double> best_f;
  for (std::size_t run = 0; run < starts.size() && done < iters; ++run) {
    State st = build(starts[run]);
    double current = ratio_of(st);
    std::vector<std::size_t> support;
    double fmax = 0.0;
    for (std::size_t i = 0; i < st.f.size(); ++i) {
      if (st.f[i] > 0.0) support.push_back(i);
      fmax = std::max(fmax, st.f[i]);
    }
    const std::int64_t steps = run + 1 == starts.size() ? iters - done : std::min(per_run, iters - done);
    std::vector<double> nv(offsets.size());
    for (std::int64_t it = 0; it < steps; ++it, ++done) {
      std::size_t x;
      if (!support.empty() && rng.uniform() < 0.5) {
        x = support[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(support.size()) - 1))];
      } else {
        x = static_cast<std::size_t>(rng.uniform_int(0, window.volume() - 1));
      }
      const double old = st.f[x];
      const double v = old == 0.0 ? rng.uniform() * (fmax > 0 ? fmax : 1.0) : old * std::exp(0.5 * rng.normal());
      const std::int64_t base = ybase(static_cast<std::int64_t>(x));
      double dA = 0.0;
      for (std::size_t j = 0; j < offsets.size(); ++j) {
        const double a = st.Af[static_cast<std::size_t>(base - offsets[j])];
        nv[j] = a + (v - old) * w;
        dA += std::pow(nv[j], pp) - std::pow(a, pp);
      }
      const double df = std::pow(v, p) - (old == 0.0 ? 0.0 : std::pow(old, p));
      const double sa = st.sa + dA;
      const double sf = st.sf + df;
      const double cand = sa > 0 && sf > 0 ? std::pow(sa, 1.0 / pp) / std::pow(sf, 1.0 / p) : 0.0;
      if (cand > current) {
        for (std::size_t j = 0; j < offsets.size(); ++j) st.Af[static_cast<std::size_t>(base - offsets[j])] = nv[j];
        st.f[x] = v;
        st.sa = sa;
        st.sf = sf;
        current = cand;
        if (old == 0.0) support.push_back(x);
        fmax = std::max(fmax, v);
        ++out.accepted;
        if (out.accepted % 1024 == 0) {
          power_sums(st);
          current = ratio_of(st);
        }
      }
      running = std::max(running, current);
      out.trajectory.push_back(std::max(running, out.start));
    }
    State exact = build(st.f);
    const double final_ratio = ratio_of(exact);
    if (final_ratio > out.best || best_f.empty()) {
      if (final_ratio > out.best) out.best = final_ratio;
      best_f = st.f;
    }
  }

  std::vector<LatticeFunction::Entry> entries;
  for (std::size_t i = 0; i < best_f.size(); ++i)
    if (best_f[i] != 0.0) entries.push_back({window.point_at(static_cast<std::int64_t>(i)), Amplitude{best_f[i], 0.0}});
  out.best_f = LatticeFunction::from_entries(n, std::move(entries));
  return out;
}

ScalingFit scaling_fit(int n, const std::vector<std::int64_t>& Ns, double p, RatioSource source, std::uint64_t seed,
                       std::int64_t ascent_iters) {
  if (Ns.size() < 4) throw DomainError("a scaling fit needs at least 4 scales");
  std::vector<double> values(Ns.size());
  std::vector<double> scales(Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const auto params = OperatorParams::sharp(n, Ns[i]);
    scales[i] = static_cast<double>(Ns[i]);
    switch (source) {
      case RatioSource::box:
        values[i] = box_extremizer_ratio(params, p);
        break;
      case RatioSource::delta:
        values[i] = delta_extremizer_ratio(params, p);
        break;
      case RatioSource::ascent:
        values[i] = random_ascent_lower_bound(params, p, stream_seed(seed, "scaling/" + std::to_string(Ns[i])),
                                              ascent_iters)
                        .best;
        break;
      case RatioSource::l2:
        values[i] = norm_l2_l2(params, 8, 0).value;
        break;
    }
  }
  const double target = source == RatioSource::delta ? delta_exponent(n, p) : theorem_exponent(n, p);
  return fit_scaling(scales, values, target);
}

ExperimentReport two_bump_separation_probe(const LatticeFunction& f, const std::vector<LatticePoint>& shifts,
                                           double p, double q, const OperatorParams& params) {
  params.validate();
  if (!(p >= 1.0) || !(q >= 1.0) || std::isinf(p) || std::isinf(q)) throw DomainError("need finite p, q >= 1");
  if (f.is_zero()) throw DomainError("separation probe needs a nonzero f");
  if (f.dim() != static_cast<std::size_t>(params.dim)) throw DomainError("function dimension does not match n");

  ExperimentReport r;
  r.name = "separation_probe";
  r.param("n", std::int64_t{params.dim}).param("N", params.N).param("p", p).param("q", q);
  r.samples = static_cast<std::int64_t>(shifts.size());

  LatticeFunction g = f;
  LatticeFunction Ag = average(g, params);
  double gp = lp_power_sum(g, p);
  double aq = lp_power_sum(Ag, q);
  const double ratio0 = std::pow(aq, 1.0 / q) / std::pow(gp, 1.0 / p);
  double ratio = ratio0;
  r.value("f_norm_0", std::pow(gp, 1.0 / p)).value("Af_norm_0", std::pow(aq, 1.0 / q)).value("ratio_0", ratio0);
  const double expected_gain = std::pow(2.0, 1.0 / q - 1.0 / p);
  r.value("expected_gain", expected_gain);

  for (std::size_t j = 0; j < shifts.size(); ++j) {
    const std::string tag = std::to_string(j + 1);
    const auto moved = g.translated(-shifts[j]);
    const auto Amoved = Ag.translated(-shifts[j]);
    const bool disjoint = supports_disjoint(g, moved) && supports_disjoint(Ag, Amoved);
    const auto gh = g + moved;
    const auto Agh = average(gh, params);
    const double gp_h = lp_power_sum(gh, p);
    const double aq_h = lp_power_sum(Agh, q);
    const double next = std::pow(aq_h, 1.0 / q) / std::pow(gp_h, 1.0 / p);
    r.value("disjoint_" + tag, disjoint ? 1.0 : 0.0)
        .value("f_norm_" + tag, std::pow(gp_h, 1.0 / p))
        .value("Af_norm_" + tag, std::pow(aq_h, 1.0 / q))
        .value("ratio_" + tag, next)
        .value("gain_" + tag, next / ratio);
    if (disjoint) {
      r.check("f_power_sum_doubles_" + tag, gp_h == 2.0 * gp, "||f_h||_p^p = 2 ||f||_p^p");
      r.check("Af_power_sum_doubles_" + tag, aq_h == 2.0 * aq, "||A f_h||_q^q = 2 ||A f||_q^q");
    }
    g = gh;
    Ag = Agh;
    gp = gp_h;
    aq = aq_h;
    ratio = next;
  }
  r.constant = ratio / ratio0;
  r.value("total_gain", r.constant);
  return r;
}

ExperimentReport interpolation_check(const OperatorParams& params, double p) {
  require_sharp(params, "interpolation_check");
  require_p(p, false);
  const double box = box_extremizer_ratio(params, p);
  const double l1 = norm_l1_linf(params);
  const double l2 = norm_l2_l2(params, 8, 0).value;
  const double theta = 2.0 / p - 1.0;
  const double bound = std::pow(l1, theta) * std::pow(l2, 1.0 - theta);

  ExperimentReport r;
  r.name = "interpolation_check";
  r.param("n", std::int64_t{params.dim}).param("N", params.N).param("p", p);
  r.samples = 1;
  r.constant = box / bound;
  r.value("box_ratio", box).value("bound", bound).value("l1_linf", l1).value("l2_l2", l2);
  r.check("riesz_thorin", box <= bound * (1.0 + 1e-9), "box ratio <= l1^theta l2^(1-theta) at p=" + fmt(p));
  return r;
}

}  // namespace paraboloid
