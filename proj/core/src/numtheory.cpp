#include "paraboloid/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>

#include "paraboloid/errors.hpp"
#include "paraboloid/parallel.hpp"

namespace paraboloid {
namespace {
__extension__ using int128 = __int128;

std::string shortest(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::int64_t abs64(std::int64_t k) { return k < 0 ? -k : k; }

void require_nonzero(std::int64_t k) {
  if (k == 0) throw DomainError("divisor counts are undefined at k = 0");
}

// Prime factorization of n >= 1 as (p, e) pairs.
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::vector<std::int64_t> divisors_of(std::int64_t n) {
  std::vector<std::int64_t> out{1};
  for (auto [p, e] : factorize(n)) {
    const std::size_t base = out.size();
    std::int64_t pk = 1;
    for (int i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void CheckParams::validate(bool require_integer_B) const {
  if (!(D > 0 && B > 0 && tau > 0 && kappa > 0 && eps > 0)) throw DomainError("check parameters must be positive");
  if (!(M >= 1)) throw DomainError("M must be >= 1");
  if (require_integer_B && B != std::floor(B)) throw DomainError("B must be a positive integer");
}

std::int64_t divisor_count(std::int64_t k) {
  require_nonzero(k);
  const std::int64_t n = abs64(k);
  std::int64_t count = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    count += (d * d == n) ? 1 : 2;
  }
  return count;
}

std::int64_t truncated_divisor_count(std::int64_t k, std::int64_t Q) {
  require_nonzero(k);
  if (Q < 1) throw DomainError("Q must be >= 1");
  const std::int64_t n = abs64(k);
  std::int64_t count = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    if (d <= Q) ++count;
    const std::int64_t e = n / d;
    if (e != d && e <= Q) ++count;
  }
  return count;
}

int mobius(std::int64_t n) {
  if (n < 1) throw DomainError("mobius requires n >= 1");
  int mu = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::int64_t euler_phi(std::int64_t n) {
  if (n < 1) throw DomainError("euler_phi requires n >= 1");
  std::int64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

DivisorSieve::DivisorSieve(std::int64_t limit, std::int64_t cap) : limit_(limit) {
  if (limit < 1) throw DomainError("sieve limit must be >= 1");
  if (limit > cap) throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds cap " + std::to_string(cap));
  const auto n = static_cast<std::size_t>(limit);
  d_.assign(n + 1, 0);
  mu_.assign(n + 1, 0);
  phi_.assign(n + 1, 0);
  std::vector<std::uint32_t> spf(n + 1, 0);
  std::vector<std::uint8_t> spf_exp(n + 1, 0);
  std::vector<std::uint32_t> primes;
  d_[1] = 1;
  mu_[1] = 1;
  phi_[1] = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      spf_exp[i] = 1;
      primes.push_back(static_cast<std::uint32_t>(i));
      d_[i] = 2;
      mu_[i] = -1;
      phi_[i] = static_cast<std::uint32_t>(i - 1);
    }
    for (std::uint32_t p : primes) {
      const std::size_t ip = i * p;
      if (p > spf[i] || ip > n) break;
      spf[ip] = p;
      if (p == spf[i]) {
        spf_exp[ip] = static_cast<std::uint8_t>(spf_exp[i] + 1);
        d_[ip] = static_cast<std::uint16_t>(d_[i] / (spf_exp[i] + 1) * (spf_exp[i] + 2));
        mu_[ip] = 0;
        phi_[ip] = phi_[i] * p;
      } else {
        spf_exp[ip] = 1;
        d_[ip] = static_cast<std::uint16_t>(d_[i] * 2);
        mu_[ip] = static_cast<std::int8_t>(-mu_[i]);
        phi_[ip] = phi_[i] * (p - 1);
      }
    }
  }
}

std::int64_t DivisorSieve::divisor_count(std::int64_t k) const {
  require_nonzero(k);
  const std::int64_t n = abs64(k);
  return n <= limit_ ? d_[static_cast<std::size_t>(n)] : paraboloid::divisor_count(n);
}

int DivisorSieve::mobius(std::int64_t k) const {
  if (k < 1) throw DomainError("mobius requires n >= 1");
  return k <= limit_ ? mu_[static_cast<std::size_t>(k)] : paraboloid::mobius(k);
}

std::int64_t DivisorSieve::euler_phi(std::int64_t k) const {
  if (k < 1) throw DomainError("euler_phi requires n >= 1");
  return k <= limit_ ? phi_[static_cast<std::size_t>(k)] : paraboloid::euler_phi(k);
}

RamanujanDirect ramanujan_sum_direct(std::int64_t q, std::int64_t k) {
  if (q < 1) throw DomainError("ramanujan_sum requires q >= 1");
  std::complex<long double> acc{0.0L, 0.0L};
  const auto step = 2.0L * std::numbers::pi_v<long double> / static_cast<long double>(q);
  const std::int64_t kq = ((k % q) + q) % q;
  for (std::int64_t a = (q == 1 ? 0 : 1); a < std::max<std::int64_t>(q, 1); ++a) {
    if (q > 1 && std::gcd(a, q) != 1) continue;
    const auto r = static_cast<std::int64_t>((static_cast<int128>(a) * kq) % q);
    const long double angle = step * static_cast<long double>(r);
    acc += std::complex<long double>(std::cos(angle), std::sin(angle));
  }
  const long double rounded = std::round(acc.real());
  const double residual = static_cast<double>(std::abs(acc - std::complex<long double>(rounded, 0.0L)));
  return {static_cast<std::int64_t>(rounded), residual};
}

std::int64_t ramanujan_sum_mobius(std::int64_t q, std::int64_t k) {
  if (q < 1) throw DomainError("ramanujan_sum requires q >= 1");
  const std::int64_t g = std::gcd(q, abs64(k));
  std::int64_t sum = 0;
  for (std::int64_t d : divisors_of(g)) sum += mobius(q / d) * d;
  return sum;
}

std::int64_t ramanujan_sum(std::int64_t q, std::int64_t k) { return ramanujan_sum_mobius(q, k); }

ExperimentReport ramanujan_block_report(std::int64_t Q, std::int64_t k, double eps) {
  if (Q < 1) throw DomainError("Q must be >= 1");
  require_nonzero(k);
  if (!(eps > 0)) throw DomainError("eps must be positive");
  std::int64_t numerator = 0;
  std::int64_t mismatches = 0;
  double residual = 0.0;
  const std::int64_t qlo = (Q + 1) / 2;
  for (std::int64_t q = qlo; q <= Q; ++q) {
    const auto direct = ramanujan_sum_direct(q, k);
    const auto exact = ramanujan_sum_mobius(q, k);
    if (direct.value != exact) ++mismatches;
    residual = std::max(residual, direct.residual);
    numerator += abs64(exact);
  }
  const std::int64_t dkQ = truncated_divisor_count(k, Q);
  const double denom = std::pow(static_cast<double>(Q), 1.0 + eps) * static_cast<double>(dkQ);

  ExperimentReport r;
  r.name = "ramanujan_block";
  r.param("Q", Q).param("k", k).param("eps", eps);
  r.samples = Q - qlo + 1;
  r.constant = static_cast<double>(numerator) / denom;
  r.value("numerator", static_cast<double>(numerator))
      .value("d_k_Q", static_cast<double>(dkQ))
      .value("ratio", r.constant)
      .value("max_residual", residual);
  r.check("direct_equals_mobius", mismatches == 0 && residual <= 1e-9, std::to_string(mismatches) + " mismatches");
  return r;
}

ExperimentReport ramanujan_agreement_report(std::int64_t qmax, std::int64_t kmax) {
  if (qmax < 1 || kmax < 0) throw DomainError("need qmax >= 1 and kmax >= 0");
  struct Row {
    std::int64_t mismatches = 0;
    double residual = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(qmax));
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto q = static_cast<std::int64_t>(i) + 1;
    // Roots of unity for this q, shared across k.
    std::vector<std::complex<long double>> roots(static_cast<std::size_t>(q));
    for (std::int64_t j = 0; j < q; ++j) {
      const long double angle = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(j) /
                                static_cast<long double>(q);
      roots[static_cast<std::size_t>(j)] = {std::cos(angle), std::sin(angle)};
    }
    const auto tot = q == 1 ? std::vector<std::int64_t>{0} : [&] {
      std::vector<std::int64_t> t;
      for (std::int64_t a = 1; a < q; ++a)
        if (std::gcd(a, q) == 1) t.push_back(a);
      return t;
    }();
    Row row;
    for (std::int64_t k = -kmax; k <= kmax; ++k) {
      const std::int64_t kq = ((k % q) + q) % q;
      std::complex<long double> acc{0.0L, 0.0L};
      for (std::int64_t a : tot) acc += roots[static_cast<std::size_t>((a * kq) % q)];
      const long double rounded = std::round(acc.real());
      const double res = static_cast<double>(std::abs(acc - std::complex<long double>(rounded, 0.0L)));
      row.residual = std::max(row.residual, res);
      if (static_cast<std::int64_t>(rounded) != ramanujan_sum_mobius(q, k)) ++row.mismatches;
    }
    rows[i] = row;
  });
  std::int64_t mismatches = 0;
  double residual = 0.0;
  for (const auto& row : rows) {
    mismatches += row.mismatches;
    residual = std::max(residual, row.residual);
  }
  ExperimentReport r;
  r.name = "ramanujan_agreement";
  r.param("qmax", qmax).param("kmax", kmax);
  r.samples = qmax * (2 * kmax + 1);
  r.constant = static_cast<double>(mismatches);
  r.value("mismatches", static_cast<double>(mismatches)).value("max_residual", residual);
  r.check("direct_equals_mobius", mismatches == 0, std::to_string(mismatches) + " mismatches");
  r.check("residual", residual <= 1e-9, "rounding residual <= 1e-9");
  return r;
}

std::vector<std::uint32_t> truncated_divisor_table(std::int64_t N, std::int64_t Q) {
  if (N < 1 || Q < 1) throw DomainError("need N >= 1 and Q >= 1");
  std::vector<std::uint32_t> t(static_cast<std::size_t>(N) + 1, 0);
  for (std::int64_t q = 1; q <= std::min(Q, N); ++q)
    for (std::int64_t k = q; k <= N; k += q) ++t[static_cast<std::size_t>(k)];
  return t;
}

std::int64_t divisor_level_count(std::int64_t N, std::int64_t Q, double D) {
  if (!(D > 0)) throw DomainError("D must be positive");
  const auto t = truncated_divisor_table(N, Q);
  return std::count_if(t.begin() + 1, t.end(), [D](std::uint32_t c) { return static_cast<double>(c) > D; });
}

ExperimentReport divisor_level_report(std::int64_t N, std::int64_t Q, const std::vector<double>& Ds, double B,
                                      double tau) {
  if (Ds.empty()) throw DomainError("need at least one threshold D");
  CheckParams{Ds.front(), B, tau}.validate();
  const auto t = truncated_divisor_table(N, Q);
  const double norm = std::pow(static_cast<double>(Q), tau) * static_cast<double>(N);

  ExperimentReport r;
  r.name = "divisor_level";
  r.param("N", N).param("Q", Q).param("B", B).param("tau", tau);
  r.samples = N;

  std::vector<double> sorted = Ds;
  std::sort(sorted.begin(), sorted.end());
  std::int64_t prev = -1;
  bool monotone = true;
  double max_ratio = 0.0;
  for (double D : sorted) {
    if (!(D > 0)) throw DomainError("D must be positive");
    const std::int64_t count =
        std::count_if(t.begin() + 1, t.end(), [D](std::uint32_t c) { return static_cast<double>(c) > D; });
    if (prev >= 0 && count > prev) monotone = false;
    prev = count;
    const double ratio = static_cast<double>(count) * std::pow(D, B) / norm;
    max_ratio = std::max(max_ratio, ratio);
    r.value("count_D=" + shortest(D), static_cast<double>(count));
    r.value("ratio_D=" + shortest(D), ratio);
  }
  r.constant = max_ratio;
  r.value("max_ratio", max_ratio);
  r.check("monotone_in_D", monotone, "level counts nonincreasing in D");

  if (B == std::floor(B) && B <= 4) {
    const int b = static_cast<int>(B);
    double moment = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) moment += std::pow(static_cast<double>(t[k]), b);
    std::int64_t qb = 1;
    for (int i = 0; i < b; ++i) qb *= Q;
    const DivisorSieve sieve(std::max<std::int64_t>(qb, 1));
    double dsum = 0.0;
    for (std::int64_t q = 1; q <= qb; ++q)
      dsum += std::pow(static_cast<double>(sieve.divisor_count(q)), b) / static_cast<double>(q);
    const double certificate = dsum / std::pow(static_cast<double>(Q), tau);
    r.value("moment", moment).value("moment_bound", static_cast<double>(N) * dsum).value("certificate", certificate);
    r.check("moment_chain", moment <= static_cast<double>(N) * dsum, "sum_k d(k,Q)^B <= N sum d(q)^B/q");
    r.check("ratio_certificate", max_ratio <= certificate, "count D^B/(Q^tau N) <= sum d(q)^B/q / Q^tau");
  }
  return r;
}

namespace {

void check_paraboloid_args(std::int64_t N, std::int64_t K, std::int64_t Q, double D, int n) {
  if (n < 2) throw DomainError("n must be >= 2");
  if (N < 0 || K < 0 || Q < 1) throw DomainError("need N >= 0, K >= 0, Q >= 1");
  if (!(D > 0)) throw DomainError("D must be positive");
  double work = std::pow(static_cast<double>(N), n - 1) * static_cast<double>(std::max(K, N * N));
  if (work > 1e9) throw CapacityError("paraboloid divisor count exceeds the 1e9 work budget");
}

}  // namespace

std::int64_t paraboloid_divisor_count(std::int64_t N, std::int64_t K, std::int64_t Q, double D, int n) {
  check_paraboloid_args(N, K, Q, D, n);
  // rep[s] = #{r' in [-N, N]^{n-1} : |r'|^2 = s}
  const std::int64_t smax = static_cast<std::int64_t>(n - 1) * N * N;
  std::vector<std::int64_t> rep(static_cast<std::size_t>(smax) + 1, 0);
  rep[0] = 1;
  std::int64_t reach = 0;
  for (int axis = 0; axis < n - 1; ++axis) {
    std::vector<std::int64_t> next(rep.size(), 0);
    for (std::int64_t s = 0; s <= reach; ++s) {
      const std::int64_t c = rep[static_cast<std::size_t>(s)];
      if (!c) continue;
      for (std::int64_t x = -N; x <= N; ++x) next[static_cast<std::size_t>(s + x * x)] += c;
    }
    reach += N * N;
    rep = std::move(next);
  }
  // v = r_n - s ranges over [-K - smax, K]; mark |v| with d(|v|, Q) > D.
  const std::int64_t vmax = K + smax;
  const auto t = truncated_divisor_table(std::max<std::int64_t>(vmax, 1), Q);
  const auto hit = [&](std::int64_t v) { return v != 0 && static_cast<double>(t[static_cast<std::size_t>(v < 0 ? -v : v)]) > D; };
  // prefix[i] = #{v in [-vmax, -vmax + i) : hit(v)}
  std::vector<std::int64_t> prefix(static_cast<std::size_t>(2 * vmax + 2), 0);
  for (std::int64_t i = 0; i <= 2 * vmax; ++i)
    prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + (hit(i - vmax) ? 1 : 0);
  std::int64_t total = 0;
  for (std::int64_t s = 0; s <= smax; ++s) {
    const std::int64_t c = rep[static_cast<std::size_t>(s)];
    if (!c) continue;
    const std::int64_t lo = -K - s + vmax;
    const std::int64_t hi = K - s + vmax;
    total += c * (prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)]);
  }
  return total;
}

std::int64_t paraboloid_divisor_count_brute(std::int64_t N, std::int64_t K, std::int64_t Q, double D, int n) {
  check_paraboloid_args(N, K, Q, D, n);
  std::vector<std::int64_t> r(static_cast<std::size_t>(n - 1), -N);
  std::int64_t total = 0;
  while (true) {
    std::int64_t s = 0;
    for (std::int64_t x : r) s += x * x;
    for (std::int64_t rn = -K; rn <= K; ++rn) {
      const std::int64_t v = rn - s;
      if (v != 0 && static_cast<double>(truncated_divisor_count(v, Q)) > D) ++total;
    }
    std::size_t i = 0;
    while (i < r.size() && ++r[i] > N) r[i++] = -N;
    if (i == r.size()) break;
  }
  return total;
}

ExperimentReport divisor_growth_report(std::int64_t kmax, double eps) {
  if (kmax < 1) throw DomainError("kmax must be >= 1");
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const DivisorSieve sieve(kmax);
  double best = 0.0;
  std::int64_t arg = 1;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    const double ratio = static_cast<double>(sieve.divisor_count(k)) / std::pow(static_cast<double>(k), eps);
    if (ratio > best) {
      best = ratio;
      arg = k;
    }
  }
  ExperimentReport r;
  r.name = "divisor_growth";
  r.param("kmax", kmax).param("eps", eps);
  r.samples = kmax;
  r.constant = best;
  r.value("sup_ratio", best).value("argmax_k", static_cast<double>(arg)).value("d_argmax",
                                                                                 static_cast<double>(sieve.divisor_count(arg)));
  r.check("finite", std::isfinite(best));
  return r;
}

}  // namespace paraboloid
