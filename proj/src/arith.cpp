#include "bqc/arith.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

namespace bqc {

i64 gcd_of(std::span<const i64> v) {
    i64 g = 0;
    for (i64 x : v) g = std::gcd(g, x);
    return g;
}

i64 ipow(i64 base, int exp) {
    i64 r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

i64 mod_inverse(i64 a, i64 m) {
    i64 old_r = mod_floor(a, m), r = m;
    i64 old_s = 1, s = 0;
    while (r != 0) {
        i64 q = old_r / r;
        std::tie(old_r, r) = std::pair{r, old_r - q * r};
        std::tie(old_s, s) = std::pair{s, old_s - q * s};
    }
    if (old_r != 1) throw std::domain_error("mod_inverse: not invertible");
    return mod_floor(old_s, m);
}

std::vector<PrimePower> factorize(i64 q) {
    if (q < 1) throw std::domain_error("factorize: q must be positive");
    std::vector<PrimePower> out;
    for (i64 p = 2; p * p <= q; ++p) {
        if (q % p) continue;
        int r = 0;
        i64 v = 1;
        while (q % p == 0) {
            q /= p;
            v *= p;
            ++r;
        }
        out.push_back({p, r, v});
    }
    if (q > 1) out.push_back({q, 1, q});
    return out;
}

std::vector<i64> primes_up_to(i64 limit) {
    std::vector<i64> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (i64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (i64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

int mobius(i64 n) {
    int mu = 1;
    for (const auto& pp : factorize(n)) {
        if (pp.r > 1) return 0;
        mu = -mu;
    }
    return mu;
}

i64 euler_phi(i64 n) {
    i64 phi = n;
    for (const auto& pp : factorize(n)) phi = phi / pp.p * (pp.p - 1);
    return phi;
}

int legendre(i64 a, i64 p) {
    a = mod_floor(a, p);
    if (a == 0) return 0;
    // Euler's criterion with 128-bit products.
    i128 result = 1, base = a;
    i64 e = (p - 1) / 2;
    while (e > 0) {
        if (e & 1) result = result * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return result == 1 ? 1 : -1;
}

i64 isqrt(i64 n) {
    if (n < 0) throw std::domain_error("isqrt: negative argument");
    auto r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<i128>(r) * r > n) --r;
    while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

i128 isqrt128(i128 n) {
    if (n < 0) throw std::domain_error("isqrt128: negative argument");
    auto r = static_cast<i128>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

i64 sup_norm(std::span<const i64> v) {
    i64 m = 0;
    for (i64 x : v) m = std::max(m, std::abs(x));
    return m;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("loglog_slope: need at least two points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double riemann_zeta(double s) {
    if (!(s > 1)) throw std::domain_error("riemann_zeta: requires s > 1");
    constexpr int N = 200;
    double sum = 0;
    for (int k = N - 1; k >= 1; --k) sum += std::pow(k, -s);
    const double n = N;
    // Euler-Maclaurin tail for sum_{k >= N} k^{-s}.
    double tail = std::pow(n, 1 - s) / (s - 1) + 0.5 * std::pow(n, -s) + s * std::pow(n, -s - 1) / 12 -
                  s * (s + 1) * (s + 2) * std::pow(n, -s - 3) / 720;
    return sum + tail;
}

}  // namespace bqc
