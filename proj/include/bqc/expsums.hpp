#pragma once

// Complete exponential sums
//
//   S_q(c) = sum_{a mod q, (a,q)=1} sum_{b mod q} e_q(a F(b) + b.c)
//
// together with Ramanujan sums, quadratic Gauss sums and dyadic averages of
// |S_q(c)|. The public `expsum` factors q into prime powers and multiplies the
// local sums; `expsum_brute` evaluates the double sum directly and serves as
// the oracle for it.

#include "bqc/arith.hpp"
#include "bqc/errors.hpp"
#include "bqc/forms.hpp"

#include <complex>
#include <span>
#include <vector>

namespace bqc {

enum class SumMethod { brute, crt };

struct ExpSumValue {
    std::complex<double> value;
    i64 q = 1;
    SumMethod method = SumMethod::brute;

    double re() const { return value.real(); }
    double im() const { return value.imag(); }
    double magnitude() const { return std::abs(value); }
};

struct DyadicAverage {
    double x = 0;
    std::vector<i64> c;
    double total = 0;  // sum of |S_q(c)| over x/2 < q <= x
};

// 0 for even n, 1 for odd n.
constexpr int kappa(std::size_t n) { return n % 2 == 0 ? 0 : 1; }

// c_q(m), exactly.
i64 ramanujan(i64 q, i64 m);

// g_{p^r}(m) = sum_{a mod p^r} (a/p^r) e_{p^r}(a m) with the Jacobi symbol (a/p)^r.
ExpSumValue gauss_sum(i64 p, int r, i64 m);

// Direct double sum; requires q^{n+1} <= budget.
ExpSumValue expsum_brute(const QuadraticForm& f, i64 q, std::span<const i64> c, double budget = kDefaultBudget);

// Product of prime-power sums. Each factor p^r is computed from the value
// distribution of (F(b), b.c) mod p^r, which needs p^{rn} <= budget.
ExpSumValue expsum(const QuadraticForm& f, i64 q, std::span<const i64> c, double budget = kDefaultBudget);

DyadicAverage sigma_n_sum(const QuadraticForm& f, double x, std::span<const i64> c, double budget = kDefaultBudget);

// |S_{p^r}(c)| predicted by the explicit prime-power formula, valid for
// p not dividing 2*Delta_F: p^{nr/2} |c_{p^r}(m)| when nr is even and
// p^{nr/2} |g_{p^r}(m)| otherwise, where m = -(4^{-1}) F*(c) mod p^r.
double prime_power_magnitude(const DualForm& dual, i64 p, int r, std::span<const i64> c);

// Envelope C * q^{n/2 + 1 + eps} * gcd(q^n, Delta_F)^{1/2}.
double standard_bound(const QuadraticForm& f, i64 q, double C = 4.0, double eps = 0.25);

}  // namespace bqc
