#pragma once

// Elementary number theory on machine integers.

#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace bqc {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

struct PrimePower {
    i64 p;
    int r;
    i64 value;  // p^r
};

inline i64 mod_floor(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 gcd_of(std::span<const i64> v);
i64 ipow(i64 base, int exp);
// Inverse of a modulo m, which must be coprime. Uses the extended Euclidean algorithm.
i64 mod_inverse(i64 a, i64 m);

std::vector<PrimePower> factorize(i64 q);
std::vector<i64> primes_up_to(i64 limit);
bool is_prime(i64 n);

int mobius(i64 n);
i64 euler_phi(i64 n);

// Legendre symbol (a/p) for odd prime p, in {-1, 0, 1}.
int legendre(i64 a, i64 p);

// floor(sqrt(n)) for n >= 0, exact.
i64 isqrt(i64 n);
i128 isqrt128(i128 n);

// Sup-norm of an integer vector.
i64 sup_norm(std::span<const i64> v);

// Least-squares slope of log(ys) against log(xs).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

// Riemann zeta for real s > 1, partial sum plus Euler-Maclaurin tail.
double riemann_zeta(double s);

}  // namespace bqc
