#include "paraboloid/arcs.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "paraboloid/errors.hpp"

namespace paraboloid {
namespace {

void require_order(int m) {
  if (m < 4) throw DomainError("spline order m must be >= 4");
}

// CDF of the centered cardinal B-spline of order m (support [-m/2, m/2]).
double bspline_cdf(double x, int m) {
  const double half = 0.5 * m;
  if (x <= -half) return 0.0;
  if (x >= half) return 1.0;
  if (x > 0.0) return 1.0 - bspline_cdf(-x, m);
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= m; ++j) {
    const double s = x + half - j;
    if (s <= 0.0) break;
    const double term = binom * std::pow(s, m);
    acc += (j % 2 == 0) ? term : -term;
    binom = binom * (m - j) / (j + 1);
  }
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  return std::clamp(acc / fact, 0.0, 1.0);
}

double sinc_pi(double x) {
  if (std::abs(x) < 1e-5) {
    const double z = std::numbers::pi * x;
    return 1.0 - z * z / 6.0;
  }
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

std::int64_t ladder_depth(std::int64_t q, std::int64_t N) {
  std::int64_t L = 0;
  while ((q << (L + 1)) < N) ++L;
  return L;
}

void append_double(std::string& s, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, res.ptr);
}

}  // namespace

std::vector<std::int64_t> totatives(std::int64_t q) {
  if (q < 1) throw DomainError("totatives requires q >= 1");
  if (q == 1) return {0};
  std::vector<std::int64_t> out;
  for (std::int64_t a = 1; a < q; ++a)
    if (std::gcd(a, q) == 1) out.push_back(a);
  return out;
}

std::vector<FareyFraction> farey_fractions(std::int64_t qmax) {
  std::vector<FareyFraction> out;
  for (std::int64_t q = 1; q <= qmax; ++q)
    for (std::int64_t a : totatives(q)) out.push_back({a, q});
  return out;
}

bool MajorArc::contains(double xi) const { return torus_distance(xi, center()) <= radius(); }
bool MajorArc::wide_contains(double xi) const { return torus_distance(xi, center()) <= wide_radius(); }

bool wide_arcs_disjoint(const std::vector<MajorArc>& arcs) {
  if (arcs.size() < 2) return true;
  std::vector<const MajorArc*> sorted;
  for (const auto& a : arcs) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](const MajorArc* x, const MajorArc* y) {
    return x->center() < y->center();
  });
  // Sorted by center, any overlap shows up between neighbours.
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const MajorArc& x = *sorted[i];
    const MajorArc& y = *sorted[(i + 1) % sorted.size()];
    double gap = y.center() - x.center();
    if (i + 1 == sorted.size()) gap += 1.0;
    if (gap <= x.wide_radius() + y.wide_radius()) return false;
  }
  return true;
}

std::vector<MajorArc> major_arcs(std::int64_t N) {
  if (N < 10) throw DomainError("major_arcs requires N >= 10");
  std::vector<MajorArc> arcs;
  for (const auto& f : farey_fractions(N / 10)) arcs.push_back({f, N});
  if (!wide_arcs_disjoint(arcs)) throw InvariantError("enlarged major arcs intersect");
  return arcs;
}

void write_arcs_csv(std::ostream& out, const std::vector<MajorArc>& arcs, int spline_order) {
  out << "q,a,center,radius,wide_radius,scales\n";
  for (const auto& arc : arcs) {
    std::string line = std::to_string(arc.frac.q) + "," + std::to_string(arc.frac.a) + ",";
    append_double(line, arc.center());
    line += ",";
    append_double(line, arc.radius());
    line += ",";
    append_double(line, arc.wide_radius());
    line += ",";
    const BumpLadder ladder(arc.frac, arc.N, spline_order);
    for (std::size_t j = 0; j < ladder.scales().size(); ++j) {
      if (j) line += ";";
      append_double(line, ladder.scales()[j]);
    }
    out << line << "\n";
  }
}

double bump_psi(double x, int m) {
  require_order(m);
  const double md = m;
  return bspline_cdf(md * (x + 1.5), m) - bspline_cdf(md * (x - 1.5), m);
}

double bump_psi_hat(double u, int m) {
  require_order(m);
  return 3.0 * sinc_pi(3.0 * u) * std::pow(sinc_pi(u / m), m);
}

BumpLadder::BumpLadder(FareyFraction frac, std::int64_t N, int spline_order)
    : frac_(frac), N_(N), m_(spline_order) {
  require_order(spline_order);
  if (frac.q < 1 || frac.a < 0 || (frac.q > 1 && frac.a >= frac.q) || (frac.q == 1 && frac.a != 0) ||
      std::gcd(frac.a, frac.q) != 1) {
    throw DomainError("ladder requires a reduced fraction a/q in [0, 1)");
  }
  if (frac.q >= N) throw DomainError("ladder requires q < N");
  L_ = static_cast<int>(ladder_depth(frac.q, N));
  for (int j = 0; j <= L_; ++j) scales_.push_back(std::ldexp(static_cast<double>(N * frac.q), j));
  scales_.push_back(static_cast<double>(N) * static_cast<double>(N));
}

std::vector<LadderLevel> BumpLadder::levels() const {
  std::vector<LadderLevel> out;
  for (int l = 0; l <= L_; ++l) out.push_back(LadderLevel::dyadic(l));
  out.push_back(LadderLevel::core_level());
  return out;
}

bool BumpLadder::has_level(LadderLevel level) const { return level.core || (level.l >= 0 && level.l <= L_); }

void BumpLadder::require(LadderLevel level) const {
  if (!has_level(level)) throw DomainError("ladder level out of range");
}

double BumpLadder::shift() const { return 3.0 / (static_cast<double>(N_) * static_cast<double>(frac_.q)); }

double BumpLadder::piece(LadderLevel level, double u) const {
  require(level);
  if (level.core) return bump_psi(scales_.back() * u, m_);
  const auto l = static_cast<std::size_t>(level.l);
  return bump_psi(scales_[l] * u, m_) - bump_psi(scales_[l + 1] * u, m_);
}

double BumpLadder::piece_hat(LadderLevel level, double t) const {
  require(level);
  if (level.core) return bump_psi_hat(t / scales_.back(), m_) / scales_.back();
  const auto l = static_cast<std::size_t>(level.l);
  return bump_psi_hat(t / scales_[l], m_) / scales_[l] - bump_psi_hat(t / scales_[l + 1], m_) / scales_[l + 1];
}

double BumpLadder::outer_radius(LadderLevel level) const {
  require(level);
  return 2.0 / (level.core ? scales_.back() : scales_[static_cast<std::size_t>(level.l)]);
}

double BumpLadder::inner_radius(LadderLevel level) const {
  require(level);
  return level.core ? 0.0 : 1.0 / scales_[static_cast<std::size_t>(level.l) + 1];
}

double eta(const BumpLadder& ladder, LadderLevel level, double xi) {
  // Supports have radius <= 2/(Nq) < 1/2, so one torus representative suffices.
  const double d = torus_signed(xi - ladder.center());
  const double ds = torus_signed(xi - ladder.center() - ladder.shift());
  return ladder.piece(level, d) - ladder.piece(level, ds);
}

std::complex<double> eta_hat(const BumpLadder& ladder, LadderLevel level, double t) {
  const auto& f = ladder.frac();
  const long double tl = t;
  const auto q = static_cast<long double>(f.q);
  const auto N = static_cast<long double>(ladder.scale());
  const auto e0 = unit_phase(static_cast<long double>(f.a) * tl / q);
  const auto e1 = unit_phase((static_cast<long double>(f.a) * N + 3.0L) * tl / (N * q));
  return ladder.piece_hat(level, t) * (e0 - e1);
}

std::string PieceSpec::label() const {
  switch (kind) {
    case PieceKind::dyadic:
      return "dyadic(Q=" + std::to_string(Q) + ",l=" + std::to_string(l) + ")";
    case PieceKind::core:
      return "core(Q=" + std::to_string(Q) + ")";
    case PieceKind::maj:
      return "maj";
    case PieceKind::min:
      return "min";
    case PieceKind::whole:
      return "whole";
  }
  return "?";
}

std::vector<std::int64_t> block_denominators(const PieceSpec& spec, std::int64_t N) {
  std::vector<std::int64_t> out;
  for (std::int64_t q = spec.Q / 2 + 1; q <= spec.Q; ++q) {
    if (spec.cap > 0 && q > spec.cap) break;
    if (q >= N) break;
    out.push_back(q);
  }
  return out;
}

void validate_piece(const PieceSpec& spec, std::int64_t N) {
  if (!spec.is_block()) return;
  if (spec.Q < 1 || !std::has_single_bit(static_cast<std::uint64_t>(spec.Q))) {
    throw DomainError("block Q must be a power of two >= 1");
  }
  const auto qs = block_denominators(spec, N);
  if (qs.empty()) throw DomainError("block " + spec.label() + " has no denominators q < N");
  if (spec.kind == PieceKind::dyadic) {
    const bool any = spec.l >= 0 && std::any_of(qs.begin(), qs.end(), [&](std::int64_t q) {
                       return spec.l <= ladder_depth(q, N);
                     });
    if (!any) throw DomainError("level l is beyond every ladder of block " + spec.label());
  }
}

std::vector<PieceSpec> decomposition_pieces(std::int64_t N) {
  std::vector<PieceSpec> out;
  const std::int64_t cap = N / 10;
  for (std::int64_t Q = 1; Q / 2 < cap; Q *= 2) {
    const PieceSpec core = PieceSpec::core(Q, cap);
    std::int64_t depth = 0;
    for (std::int64_t q : block_denominators(core, N)) depth = std::max(depth, ladder_depth(q, N));
    out.push_back(core);
    for (int l = 0; l <= depth; ++l) out.push_back(PieceSpec::dyadic(Q, l, cap));
  }
  return out;
}

double piece_weight(const PieceSpec& spec, double xi_n, std::int64_t N, int spline_order) {
  validate_piece(spec, N);
  if (!spec.is_block()) throw DomainError("piece_weight requires a dyadic or core piece");
  const LadderLevel level = spec.kind == PieceKind::core ? LadderLevel::core_level() : LadderLevel::dyadic(spec.l);
  double w = 0.0;
  for (std::int64_t q : block_denominators(spec, N)) {
    for (std::int64_t a : totatives(q)) {
      const BumpLadder ladder({a, q}, N, spline_order);
      if (ladder.has_level(level)) w += eta(ladder, level, xi_n);
    }
  }
  return w;
}

double major_weight(double xi_n, std::int64_t N, int spline_order) {
  double w = 0.0;
  for (const auto& f : farey_fractions(N / 10)) {
    const BumpLadder ladder(f, N, spline_order);
    // Only the arc around a/q and its translate can be nonzero.
    if (torus_distance(xi_n, f.value() + 0.5 * ladder.shift()) > 3.5 * ladder.shift()) continue;
    for (const auto& level : ladder.levels()) w += eta(ladder, level, xi_n);
  }
  return w;
}

std::complex<double> piece_multiplier(const PieceSpec& spec, const TorusPoint& xi, const OperatorParams& params,
                                      int spline_order) {
  const auto m = multiplier(xi, params);
  const double xi_n = xi[xi.dim() - 1];
  switch (spec.kind) {
    case PieceKind::whole:
      return m;
    case PieceKind::maj:
      return m * major_weight(xi_n, params.N, spline_order);
    case PieceKind::min:
      return m - m * major_weight(xi_n, params.N, spline_order);
    case PieceKind::dyadic:
    case PieceKind::core:
      return m * piece_weight(spec, xi_n, params.N, spline_order);
  }
  return m;
}

std::vector<SupportInterval> eta_support_intervals(std::int64_t N, int spline_order) {
  std::vector<SupportInterval> out;
  for (const auto& f : farey_fractions(N / 10)) {
    const BumpLadder ladder(f, N, spline_order);
    for (const auto& level : ladder.levels()) {
      const double r = ladder.outer_radius(level);
      const double inner = ladder.inner_radius(level);
      for (int shifted = 0; shifted < 2; ++shifted) {
        const double c = f.value() + (shifted ? ladder.shift() : 0.0);
        if (level.core) {
          out.push_back({f, level, shifted == 1, c - r, c + r});
        } else {
          out.push_back({f, level, shifted == 1, c - r, c - inner});
          out.push_back({f, level, shifted == 1, c + inner, c + r});
        }
      }
    }
  }
  return out;
}

bool eta_supports_disjoint(std::int64_t N, int spline_order) {
  struct Piece {
    double lo, hi;
    std::size_t src;
  };
  const auto intervals = eta_support_intervals(N, spline_order);
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const double lo = intervals[i].lo;
    const double hi = intervals[i].hi;
    const double shift = std::floor(lo);
    const double a = lo - shift;
    const double b = hi - shift;
    if (b <= 1.0) {
      pieces.push_back({a, b, i});
    } else {
      pieces.push_back({a, 1.0, i});
      pieces.push_back({0.0, b - 1.0, i});
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });

  const auto exempt = [&](std::size_t i, std::size_t j) {
    const auto& x = intervals[i];
    const auto& y = intervals[j];
    if (!(x.frac == y.frac)) return false;
    if (x.level.core || y.level.core) return true;
    return std::abs(x.level.l - y.level.l) < 2;
  };
  constexpr double kTouch = 1e-12;
  std::vector<const Piece*> active;
  for (const auto& p : pieces) {
    std::erase_if(active, [&](const Piece* a) { return a->hi <= p.lo + kTouch; });
    for (const Piece* a : active) {
      if (a->src != p.src && !exempt(a->src, p.src)) return false;
    }
    active.push_back(&p);
  }
  return true;
}

}  // namespace paraboloid
