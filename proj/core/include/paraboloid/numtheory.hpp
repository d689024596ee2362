#pragma once

#include <cstdint>
#include <vector>

#include "paraboloid/report.hpp"

namespace paraboloid {

/// Parameters of the divisor-threshold estimates.
struct CheckParams {
  double D = 2.0;      // divisor threshold
  double B = 2.0;      // moment exponent
  double tau = 0.5;    // loss exponent in Q
  double kappa = 0.1;  // decay exponent
  double M = 1.0;
  double eps = 0.2;

  // Throws DomainError unless all are positive and M >= 1. With
  // require_integer_B, B must also be a positive integer.
  void validate(bool require_integer_B = false) const;
};

// Number of positive divisors of |k|, by trial division. Throws DomainError for k = 0.
std::int64_t divisor_count(std::int64_t k);

// #{d >= 1 : d | k, d <= Q}. Throws DomainError for k = 0 or Q < 1.
std::int64_t truncated_divisor_count(std::int64_t k, std::int64_t Q);

int mobius(std::int64_t n);
std::int64_t euler_phi(std::int64_t n);

/// Linear sieve of d(k), mu(k), phi(k) for 1 <= k <= limit.
class DivisorSieve {
 public:
  static constexpr std::int64_t kDefaultCap = 10'000'000;

  // Throws CapacityError when limit exceeds cap.
  explicit DivisorSieve(std::int64_t limit, std::int64_t cap = kDefaultCap);

  std::int64_t limit() const { return limit_; }
  // Table lookup for |k| <= limit, trial division beyond.
  std::int64_t divisor_count(std::int64_t k) const;
  int mobius(std::int64_t k) const;
  std::int64_t euler_phi(std::int64_t k) const;

 private:
  std::int64_t limit_;
  std::vector<std::uint16_t> d_;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint32_t> phi_;
};

struct RamanujanDirect {
  std::int64_t value;
  double residual;  // distance of the complex sum from the rounded integer
};

// c_q(k) = sum_{a in A_q} e(ak/q) by complex summation, a k reduced mod q first.
RamanujanDirect ramanujan_sum_direct(std::int64_t q, std::int64_t k);

// c_q(k) = sum_{d | gcd(q, k)} mu(q/d) d, with gcd(q, 0) = q.
std::int64_t ramanujan_sum_mobius(std::int64_t q, std::int64_t k);

// The Moebius value; c_1(k) = 1 under A_1 = {0}. Throws DomainError for q < 1.
std::int64_t ramanujan_sum(std::int64_t q, std::int64_t k);

// sum_{Q/2 <= q <= Q} |c_q(k)| / (Q^{1+eps} d(k, Q)), both evaluations checked
// against each other.
ExperimentReport ramanujan_block_report(std::int64_t Q, std::int64_t k, double eps);

// Direct versus Moebius evaluation for every 1 <= q <= qmax, |k| <= kmax.
ExperimentReport ramanujan_agreement_report(std::int64_t qmax, std::int64_t kmax);

// d(k, Q) for 1 <= k <= N (index 0 unused), by marking multiples.
std::vector<std::uint32_t> truncated_divisor_table(std::int64_t N, std::int64_t Q);

// #{1 <= k <= N : d(k, Q) > D}.
std::int64_t divisor_level_count(std::int64_t N, std::int64_t Q, double D);

// Level counts for each D with ratio count D^B / (Q^tau N), monotonicity in D,
// and the moment chain
//   count D^B <= sum_k d(k,Q)^B <= N sum_{q <= Q^B} d(q)^B / q
// (integer B) as a certificate for the ratio.
ExperimentReport divisor_level_report(std::int64_t N, std::int64_t Q, const std::vector<double>& Ds, double B,
                                      double tau);

// #{(r', r_n) : |r_i| <= N, |r_n| <= K, v = r_n - |r'|^2 != 0, d(|v|, Q) > D}
// in Z^{n-1} x Z, by iterating over |r'|^2 with representation counts. Throws
// CapacityError when N^{n-1} max(K, N^2) exceeds 1e9.
std::int64_t paraboloid_divisor_count(std::int64_t N, std::int64_t K, std::int64_t Q, double D, int n);

// The same count by enumerating every lattice point.
std::int64_t paraboloid_divisor_count_brute(std::int64_t N, std::int64_t K, std::int64_t Q, double D, int n);

// sup_{k <= kmax} d(k) / k^eps with its argmax.
ExperimentReport divisor_growth_report(std::int64_t kmax, double eps);

}  // namespace paraboloid
