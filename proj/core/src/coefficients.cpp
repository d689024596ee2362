#include "paraboloid/coefficients.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "paraboloid/errors.hpp"
#include "paraboloid/parallel.hpp"

namespace paraboloid {
namespace {

struct Term {
  BumpLadder ladder;
  std::vector<LadderLevel> levels;
};

std::vector<Term> piece_terms(const PieceSpec& spec, std::int64_t N, int m) {
  validate_piece(spec, N);
  const LadderLevel level = spec.kind == PieceKind::core ? LadderLevel::core_level() : LadderLevel::dyadic(spec.l);
  std::vector<Term> out;
  for (std::int64_t q : block_denominators(spec, N)) {
    for (std::int64_t a : totatives(q)) {
      BumpLadder ladder({a, q}, N, m);
      if (ladder.has_level(level)) out.push_back({std::move(ladder), {level}});
    }
  }
  return out;
}

std::vector<Term> major_terms(std::int64_t N, std::int64_t q_limit, int m) {
  std::int64_t qmax = N / 10;
  if (q_limit > 0) qmax = std::min(qmax, q_limit);
  std::vector<Term> out;
  for (const auto& f : farey_fractions(qmax)) {
    BumpLadder ladder(f, N, m);
    auto levels = ladder.levels();
    out.push_back({std::move(ladder), std::move(levels)});
  }
  return out;
}

std::complex<double> closed_form(const std::vector<Term>& terms, double t) {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& term : terms)
    for (const auto& level : term.levels) acc += eta_hat(term.ladder, level, t);
  return acc;
}

double weight_at(const Term& term, double xi) {
  double w = 0.0;
  for (const auto& level : term.levels) w += eta(term.ladder, level, xi);
  return w;
}

struct Window {
  double lo;
  double len;
  bool periodic;
};

Window window_of(const Term& term) {
  double R = 0.0;
  for (const auto& level : term.levels) R = std::max(R, term.ladder.outer_radius(level));
  const double len = term.ladder.shift() + 2.0 * R;
  const double lo = term.ladder.center() - R;
  if (len >= 1.0) return {lo, 1.0, true};
  return {lo, len, false};
}

OracleResult quadrature(const std::vector<Term>& terms, double t, std::int64_t grid_size) {
  if (grid_size < 4096 || !std::has_single_bit(static_cast<std::uint64_t>(grid_size))) {
    throw DomainError("oracle grid_size must be a power of two >= 4096");
  }
  const long double tl = t;
  const auto f = [&](const Term& term, double xi, double& l1) {
    const double w = weight_at(term, xi);
    l1 += std::abs(w);
    return w == 0.0 ? std::complex<double>{0.0, 0.0} : w * unit_phase(tl * static_cast<long double>(xi));
  };

  // Weighted sums S_i with I_i = h_i S_i; doubling adds the odd midpoints.
  struct State {
    Window win;
    std::complex<double> sum;
    double l1sum;
  };
  std::vector<State> states;
  std::int64_t G = grid_size;
  for (const auto& term : terms) {
    State st{window_of(term), {0.0, 0.0}, 0.0};
    const double h = st.win.len / static_cast<double>(G);
    const std::int64_t last = st.win.periodic ? G - 1 : G;
    for (std::int64_t j = 0; j <= last; ++j) {
      double l1 = 0.0;
      auto v = f(term, st.win.lo + static_cast<double>(j) * h, l1);
      const double wt = (!st.win.periodic && (j == 0 || j == G)) ? 0.5 : 1.0;
      st.sum += wt * v;
      st.l1sum += wt * l1;
    }
    states.push_back(st);
  }
  const auto total = [&](std::int64_t g, double& l1) {
    std::complex<double> acc{0.0, 0.0};
    l1 = 0.0;
    for (const auto& st : states) {
      const double h = st.win.len / static_cast<double>(g);
      acc += h * st.sum;
      l1 += h * st.l1sum;
    }
    return acc;
  };

  double l1 = 0.0;
  std::complex<double> prev = total(G, l1);
  for (int refinement = 1; refinement <= 4; ++refinement) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      auto& st = states[i];
      const double h = st.win.len / static_cast<double>(G);
      for (std::int64_t j = 0; j < G; ++j) {
        double a = 0.0;
        st.sum += f(terms[i], st.win.lo + (static_cast<double>(j) + 0.5) * h, a);
        st.l1sum += a;
      }
    }
    G *= 2;
    const std::complex<double> cur = total(G, l1);
    const double change = std::abs(cur - prev);
    if (change <= 1e-9 * std::abs(cur) + 1e-13 * l1) return {cur, G, change, l1};
    prev = cur;
  }
  throw ConvergenceError("coefficient quadrature did not converge after 4 refinements");
}

void require_smooth(const OperatorParams& params) {
  params.validate();
  if (params.cutoff.kind() != CutoffKind::smooth) throw DomainError("coefficients require the smooth cutoff");
}

struct Residual {
  double weight;  // prod sigma(r_i)
  std::int64_t t;  // |r'|^2 - r_n
};

Residual residual_of(const LatticePoint& r, const OperatorParams& params) {
  if (r.dim() != static_cast<std::size_t>(params.dim)) throw DomainError("r dimension does not match n");
  double w = 1.0;
  std::int64_t s = 0;
  for (std::size_t i = 0; i + 1 < r.dim(); ++i) {
    w *= params.cutoff(r[i]);
    s += r[i] * r[i];
  }
  return {w, s - r[r.dim() - 1]};
}

// Range maximum with argmax over a fixed array (sparse table).
class RangeMax {
 public:
  explicit RangeMax(const std::vector<double>& v) {
    table_.push_back({});
    for (std::size_t i = 0; i < v.size(); ++i) table_[0].push_back(i);
    values_ = &v;
    for (std::size_t k = 1; (std::size_t{1} << k) <= v.size(); ++k) {
      const std::size_t span = std::size_t{1} << k;
      std::vector<std::size_t> row(v.size() - span + 1);
      for (std::size_t i = 0; i + span <= v.size(); ++i) {
        const std::size_t a = table_[k - 1][i];
        const std::size_t b = table_[k - 1][i + span / 2];
        row[i] = v[b] > v[a] ? b : a;
      }
      table_.push_back(std::move(row));
    }
  }
  // argmax over [lo, hi] inclusive (first index on ties).
  std::size_t argmax(std::size_t lo, std::size_t hi) const {
    const std::size_t k = static_cast<std::size_t>(std::bit_width(hi - lo + 1)) - 1;
    const std::size_t a = table_[k][lo];
    const std::size_t b = table_[k][hi + 1 - (std::size_t{1} << k)];
    return (*values_)[b] > (*values_)[a] ? b : a;
  }

 private:
  const std::vector<double>* values_ = nullptr;
  std::vector<std::vector<std::size_t>> table_;
};

// For |r_i| <= 2N - 1 (sigma vanishes beyond) and |r_n| <= 5N^2, combines
// |c(t)| over t = |r'|^2 - r_n with prod sigma(r_i).
struct ScanResult {
  double sup = 0.0;
  LatticePoint arg;
  std::int64_t arg_t = 0;
  double tail = 0.0;  // max |c(t)| over |t| >= 5N^2
};

struct ScanBox {
  std::int64_t tmin, tmax;
  std::int64_t band;
};

ScanBox scan_box(const OperatorParams& params) {
  const std::int64_t N = params.N;
  const std::int64_t band = 5 * N * N;
  const std::int64_t rmax = 2 * N - 1;
  return {-band, static_cast<std::int64_t>(params.dim - 1) * rmax * rmax + band, band};
}

ScanResult scan(const OperatorParams& params, const ScanBox& box, const std::vector<double>& abs_c,
                std::vector<DecayRow>* rows, double bound) {
  const RangeMax rm(abs_c);
  const int free_axes = params.dim - 1;
  const std::int64_t rmax = 2 * params.N - 1;
  ScanResult out;
  out.arg = LatticePoint::origin(static_cast<std::size_t>(params.dim));

  // Best weight and a representative r' for each value s = |r'|^2.
  const std::int64_t smax = static_cast<std::int64_t>(free_axes) * rmax * rmax;
  std::vector<double> best_w(static_cast<std::size_t>(smax) + 1, -1.0);
  std::vector<std::vector<std::int64_t>> best_r(static_cast<std::size_t>(smax) + 1);
  std::vector<std::int64_t> r(static_cast<std::size_t>(free_axes), -rmax);
  while (true) {
    double w = 1.0;
    std::int64_t s = 0;
    for (std::int64_t x : r) {
      w *= params.cutoff(x);
      s += x * x;
    }
    auto& bw = best_w[static_cast<std::size_t>(s)];
    if (w > bw) {
      bw = w;
      best_r[static_cast<std::size_t>(s)] = r;
    }
    std::size_t i = 0;
    while (i < r.size() && ++r[i] > rmax) r[i++] = -rmax;
    if (i == r.size()) break;
  }

  const auto point = [&](std::int64_t s, std::int64_t t) {
    std::vector<std::int64_t> c = best_r[static_cast<std::size_t>(s)];
    c.push_back(s - t);
    return LatticePoint(std::move(c));
  };
  for (std::int64_t s = 0; s <= smax; ++s) {
    const double w = best_w[static_cast<std::size_t>(s)];
    if (w <= 0.0) continue;
    const auto lo = static_cast<std::size_t>(s - box.band - box.tmin);
    const auto hi = static_cast<std::size_t>(s + box.band - box.tmin);
    const std::size_t i = rm.argmax(lo, hi);
    const double v = w * abs_c[i];
    if (v > out.sup) {
      out.sup = v;
      out.arg_t = static_cast<std::int64_t>(i) + box.tmin;
      out.arg = point(s, out.arg_t);
    }
  }
  for (std::size_t i = 0; i < abs_c.size(); ++i) {
    const std::int64_t t = static_cast<std::int64_t>(i) + box.tmin;
    if (t >= box.band || t <= -box.band) out.tail = std::max(out.tail, abs_c[i]);
  }

  if (rows) {
    // For each residual t, the largest weight among s with |s - t| <= band.
    const RangeMax wm(best_w);
    for (std::int64_t t = box.tmin; t <= box.tmax; ++t) {
      const std::int64_t slo = std::max<std::int64_t>(0, t - box.band);
      const std::int64_t shi = std::min(smax, t + box.band);
      if (slo > shi) continue;
      const std::size_t s = wm.argmax(static_cast<std::size_t>(slo), static_cast<std::size_t>(shi));
      const double w = best_w[s];
      if (w <= 0.0) continue;
      const double c = w * abs_c[static_cast<std::size_t>(t - box.tmin)];
      rows->push_back({point(static_cast<std::int64_t>(s), t), t, c, bound, c / bound});
    }
  }
  return out;
}

std::vector<double> abs_transform(const std::vector<Term>& terms, const ScanBox& box, bool add_delta) {
  std::vector<double> out(static_cast<std::size_t>(box.tmax - box.tmin + 1));
  parallel_for(out.size(), [&](std::size_t i) {
    const std::int64_t t = static_cast<std::int64_t>(i) + box.tmin;
    auto c = closed_form(terms, static_cast<double>(t));
    if (add_delta) c = (t == 0 ? 1.0 : 0.0) - c;
    out[i] = std::abs(c);
  });
  return out;
}

std::string point_text(const LatticePoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p[i]);
  }
  return s;
}

}  // namespace

std::complex<double> piece_coefficient(const CoefficientQuery& query) {
  require_smooth(query.params);
  if (!query.spec.is_block()) throw DomainError("piece_coefficient requires a dyadic or core piece");
  const auto terms = piece_terms(query.spec, query.params.N, query.spline_order);
  const auto [w, t] = residual_of(query.r, query.params);
  if (w == 0.0) return {0.0, 0.0};
  return w * closed_form(terms, static_cast<double>(t));
}

OracleResult piece_coefficient_oracle(const CoefficientQuery& query, std::int64_t grid_size) {
  require_smooth(query.params);
  if (!query.spec.is_block()) throw DomainError("piece_coefficient_oracle requires a dyadic or core piece");
  const auto terms = piece_terms(query.spec, query.params.N, query.spline_order);
  const auto [w, t] = residual_of(query.r, query.params);
  auto res = quadrature(terms, static_cast<double>(t), grid_size);
  res.value *= w;
  return res;
}

std::complex<double> major_coefficient(const LatticePoint& r, const OperatorParams& params, std::int64_t q_limit,
                                       int spline_order) {
  require_smooth(params);
  const auto [w, t] = residual_of(r, params);
  if (w == 0.0) return {0.0, 0.0};
  return w * closed_form(major_terms(params.N, q_limit, spline_order), static_cast<double>(t));
}

OracleResult major_coefficient_oracle(const LatticePoint& r, const OperatorParams& params, std::int64_t q_limit,
                                      std::int64_t grid_size, int spline_order) {
  require_smooth(params);
  const auto [w, t] = residual_of(r, params);
  auto res = quadrature(major_terms(params.N, q_limit, spline_order), static_cast<double>(t), grid_size);
  res.value *= w;
  return res;
}

std::complex<double> minor_coefficient(const LatticePoint& r, const OperatorParams& params, int spline_order) {
  require_smooth(params);
  const auto [w, t] = residual_of(r, params);
  const std::complex<double> whole = t == 0 ? w : 0.0;
  return whole - major_coefficient(r, params, 0, spline_order);
}

ExperimentReport coefficient_decay_report(const PieceSpec& spec, const OperatorParams& params, double eps,
                                          std::vector<DecayRow>* rows, int spline_order) {
  require_smooth(params);
  if (!spec.is_block()) throw DomainError("coefficient_decay_report requires a dyadic or core piece");
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const auto terms = piece_terms(spec, params.N, spline_order);
  const auto box = scan_box(params);
  const auto abs_c = abs_transform(terms, box, false);

  const double N = static_cast<double>(params.N);
  const double Q = static_cast<double>(spec.Q);
  const double scale = spec.kind == PieceKind::dyadic ? N * std::ldexp(1.0, spec.l) : N * N / Q;
  const double bound = std::pow(Q * N, eps) / scale;
  const auto res = scan(params, box, abs_c, rows, bound);

  ExperimentReport r;
  r.name = "coefficient_decay";
  r.param("piece", spec.label()).param("n", std::int64_t{params.dim}).param("N", params.N).param("eps", eps);
  r.param("spline_order", std::int64_t{spline_order});
  r.samples = static_cast<std::int64_t>(abs_c.size());
  r.constant = res.sup / bound;
  const double bulk = spec.kind == PieceKind::dyadic ? scale * Q : N * N;
  r.value("sup", res.sup)
      .value("bound", bound)
      .value("normalized_sup", r.constant)
      .value("argmax_residual", static_cast<double>(res.arg_t))
      .value("argmax_residual_over_bulk", std::abs(static_cast<double>(res.arg_t)) / bulk)
      .value("tail_ratio", res.sup > 0 ? res.tail / res.sup : 0.0)
      .value("decay_exponent", static_cast<double>(spline_order + 1));
  r.check("vanishes_on_paraboloid", abs_c[static_cast<std::size_t>(-box.tmin)] == 0.0,
          "coefficient is exactly 0 at |r'|^2 = r_n");
  return r;
}

void write_decay_csv(std::ostream& out, const std::vector<DecayRow>& rows) {
  out << "r,residual,abs_coefficient,bound,ratio\n";
  for (const auto& row : rows) {
    out << point_text(row.r) << ',' << row.residual << ',' << row.abs_coefficient << ',' << row.bound << ','
        << row.ratio << '\n';
  }
}

ExperimentReport piece_sup_report(const PieceSpec& spec, const OperatorParams& params, int resolution, double eps,
                                  int spline_order) {
  params.validate();
  if (resolution < 1) throw DomainError("resolution must be >= 1");
  const std::int64_t N = params.N;
  const auto G = static_cast<std::int64_t>(resolution) * N * N;
  const double h = 1.0 / static_cast<double>(G);

  std::vector<double> ts;
  std::vector<double> ws;
  if (spec.is_block()) {
    const auto terms = piece_terms(spec, N, spline_order);
    std::set<std::int64_t> idx;
    for (const auto& term : terms) {
      const auto win = window_of(term);
      const auto lo = static_cast<std::int64_t>(std::floor(win.lo / h));
      const auto hi = static_cast<std::int64_t>(std::ceil((win.lo + win.len) / h));
      for (std::int64_t k = lo; k <= hi; ++k) idx.insert(((k % G) + G) % G);
    }
    for (std::int64_t k : idx) {
      const double xi = static_cast<double>(k) * h;
      double w = 0.0;
      for (const auto& term : terms) w += weight_at(term, xi);
      ts.push_back(xi);
      ws.push_back(w);
    }
  } else {
    ts.resize(static_cast<std::size_t>(G));
    ws.resize(ts.size());
    parallel_for(ts.size(), [&](std::size_t k) {
      const double xi = static_cast<double>(k) * h;
      ts[k] = xi;
      if (spec.kind == PieceKind::whole) {
        ws[k] = 1.0;
      } else {
        const double W = major_weight(xi, N, spline_order);
        ws[k] = spec.kind == PieceKind::maj ? W : 1.0 - W;
      }
    });
  }
  const auto sup = weighted_gauss_sup(ts, ws, params.dim - 1, params.cutoff);

  const double Nd = static_cast<double>(N);
  const double half = 0.5 * (params.dim - 1);
  double norm = std::pow(Nd, params.dim - 1);
  switch (spec.kind) {
    case PieceKind::dyadic:
      norm = std::pow(Nd * std::ldexp(1.0, spec.l), half);
      break;
    case PieceKind::core:
      norm = std::pow(Nd * Nd / static_cast<double>(spec.Q), half);
      break;
    case PieceKind::min:
      norm = std::pow(Nd, half + eps);
      break;
    default:
      break;
  }

  ExperimentReport r;
  r.name = "piece_sup";
  r.param("piece", spec.label()).param("n", std::int64_t{params.dim}).param("N", N);
  r.param("resolution", std::int64_t{resolution}).param("eps", eps);
  r.samples = static_cast<std::int64_t>(ts.size());
  r.constant = sup.value / norm;
  r.value("sup", sup.value)
      .value("normalizer", norm)
      .value("normalized_sup", r.constant)
      .value("argmax_xi_n", sup.t)
      .value("argmax_y", sup.y)
      .value("refined_points", static_cast<double>(sup.refined));
  r.check("finite", std::isfinite(sup.value));
  return r;
}

ExperimentReport minor_coefficient_report(const OperatorParams& params, double eps, int spline_order) {
  require_smooth(params);
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const auto terms = major_terms(params.N, 0, spline_order);
  const auto box = scan_box(params);
  const auto abs_c = abs_transform(terms, box, true);
  const auto res = scan(params, box, abs_c, nullptr, 1.0);
  const double norm = std::pow(static_cast<double>(params.N), eps);

  ExperimentReport r;
  r.name = "minor_coefficient";
  r.param("n", std::int64_t{params.dim}).param("N", params.N).param("eps", eps);
  r.samples = static_cast<std::int64_t>(abs_c.size());
  r.constant = res.sup / norm;
  r.value("sup", res.sup)
      .value("normalized_sup", r.constant)
      .value("argmax_residual", static_cast<double>(res.arg_t))
      .value("arcs", static_cast<double>(terms.size()));
  r.check("finite", std::isfinite(res.sup));
  return r;
}

}  // namespace paraboloid
