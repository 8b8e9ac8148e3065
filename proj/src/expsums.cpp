#include "bqc/expsums.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bqc {

namespace {

std::vector<std::complex<double>> roots_of_unity(i64 q) {
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(q));
    for (i64 t = 0; t < q; ++t) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(q);
        roots[t] = {std::cos(angle), std::sin(angle)};
    }
    return roots;
}

std::vector<i64> units_mod(i64 q) {
    std::vector<i64> units;
    for (i64 a = 0; a < q; ++a)
        if (std::gcd(a, q) == 1) units.push_back(a);
    return units;
}

double power_work(i64 q, std::size_t e) { return std::pow(static_cast<double>(q), static_cast<double>(e)); }

// Walks b over (Z/q)^n and reports (F(b) mod q, b.c mod q). F is updated
// incrementally along the fastest coordinate.
template <class Visit>
void for_each_residue_vector(const QuadraticForm& f, i64 q, std::span<const i64> c, Visit&& visit) {
    const std::size_t n = f.dim();
    const auto& g = f.gram_i64();
    std::vector<i64> m(n * n), cm(n);
    for (std::size_t i = 0; i < n * n; ++i) m[i] = mod_floor(g[i], q);
    for (std::size_t i = 0; i < n; ++i) cm[i] = mod_floor(c[i], q);

    std::vector<i64> b(n, 0), mb(n, 0);
    i64 fv = 0, dot = 0;
    auto recompute = [&] {
        fv = 0;
        dot = 0;
        for (std::size_t i = 0; i < n; ++i) {
            i128 row = 0;
            for (std::size_t j = 0; j < n; ++j) row += static_cast<i128>(m[i * n + j]) * b[j];
            mb[i] = static_cast<i64>(row % q);
            fv = static_cast<i64>((fv + static_cast<i128>(mb[i]) * b[i]) % q);
            dot = static_cast<i64>((dot + static_cast<i128>(cm[i]) * b[i]) % q);
        }
    };
    recompute();
    const i64 m00 = m[0];
    while (true) {
        visit(fv, dot);
        if (b[0] + 1 < q) {
            // F(b + e_0) = F(b) + 2 (Mb)_0 + M_00
            fv = (fv + 2 * mb[0] + m00) % q;
            for (std::size_t i = 0; i < n; ++i) {
                mb[i] += m[i * n];
                if (mb[i] >= q) mb[i] -= q;
            }
            dot += cm[0];
            if (dot >= q) dot -= q;
            ++b[0];
            continue;
        }
        std::size_t k = 0;
        while (k < n && b[k] + 1 == q) b[k++] = 0;
        if (k == n) break;
        ++b[k];
        recompute();
    }
}

i64 mulmod(i64 a, i64 b, i64 q) { return static_cast<i64>(static_cast<i128>(a) * b % q); }

// Valuation of a residue in [0, p^r); r for zero.
int valuation_mod(i64 x, i64 p, int r) {
    if (x == 0) return r;
    int v = 0;
    for (; x % p == 0; x /= p) ++v;
    return v;
}

// For odd p: P^T M P = diag(d) mod q = p^r with P invertible mod q (Jordan splitting).
// P is row-major; b = P z maps (Z/q)^n onto itself.
void diagonalize_mod(const QuadraticForm& f, i64 p, int r, i64 q, std::vector<i64>& d, std::vector<i64>& P) {
    const std::size_t n = f.dim();
    std::vector<i64> A(n * n);
    P.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        P[i * n + i] = 1;
        for (std::size_t j = 0; j < n; ++j) {
            const Integer v = f.gram()(i, j) % q;
            A[i * n + j] = mod_floor(static_cast<i64>(v), q);
        }
    }
    // e_dst <- e_dst + t e_src, applied as a congruence.
    auto add_col = [&](std::size_t dst, std::size_t src, i64 t) {
        for (std::size_t l = 0; l < n; ++l) A[l * n + dst] = (A[l * n + dst] + mulmod(t, A[l * n + src], q)) % q;
        for (std::size_t l = 0; l < n; ++l) A[dst * n + l] = (A[dst * n + l] + mulmod(t, A[src * n + l], q)) % q;
        for (std::size_t l = 0; l < n; ++l) P[l * n + dst] = (P[l * n + dst] + mulmod(t, P[l * n + src], q)) % q;
    };
    auto swap_basis = [&](std::size_t i, std::size_t k) {
        if (i == k) return;
        for (std::size_t l = 0; l < n; ++l) std::swap(A[l * n + i], A[l * n + k]);
        for (std::size_t l = 0; l < n; ++l) std::swap(A[i * n + l], A[k * n + l]);
        for (std::size_t l = 0; l < n; ++l) std::swap(P[l * n + i], P[l * n + k]);
    };
    for (std::size_t k = 0; k < n; ++k) {
        int best = r;
        std::size_t bi = k, bj = k;
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const int v = valuation_mod(A[i * n + j], p, r);
                if (v < best || (v == best && i == j && bi != bj)) best = v, bi = i, bj = j;
            }
        if (best == r) break;
        // Off-diagonal minimum: e_i + e_j has a diagonal entry of the same valuation since p is odd.
        if (bi != bj) add_col(bi, bj, 1);
        swap_basis(bi, k);
        const i64 pv = ipow(p, best);
        const i64 unit_inv = mod_inverse((A[k * n + k] / pv) % q, q);
        for (std::size_t j = k + 1; j < n; ++j) {
            if (A[k * n + j] == 0) continue;
            const i64 t = mod_floor(-mulmod(A[k * n + j] / pv, unit_inv, q), q);
            add_col(j, k, t);
        }
    }
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = A[i * n + i];
}

// S_{p^r}(c) for odd p as a product of one-variable sums after diagonalizing.
ExpSumValue odd_prime_power_sum(const QuadraticForm& f, const PrimePower& pp, std::span<const i64> c) {
    const std::size_t n = f.dim();
    const i64 q = pp.value;
    std::vector<i64> d, P;
    diagonalize_mod(f, pp.p, pp.r, q, d, P);
    std::vector<i64> beta(n, 0);  // P^T c
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) beta[j] = (beta[j] + mulmod(P[i * n + j], mod_floor(c[i], q), q)) % q;

    const auto roots = roots_of_unity(q);
    std::vector<i64> squares(static_cast<std::size_t>(q));
    for (i64 z = 0; z < q; ++z) squares[z] = mulmod(z, z, q);
    std::complex<double> total = 0;
    for (i64 a : units_mod(q)) {
        std::complex<double> prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const i64 alpha = mulmod(a, d[i], q);
            std::complex<double> g = 0;
            for (i64 z = 0; z < q; ++z) g += roots[(mulmod(alpha, squares[z], q) + mulmod(beta[i], z, q)) % q];
            prod *= g;
        }
        total += prod;
    }
    return {total, q, SumMethod::crt};
}

ExpSumValue prime_power_sum(const QuadraticForm& f, const PrimePower& pp, std::span<const i64> c, double budget) {
    const std::size_t n = f.dim();
    const i64 q = pp.value;
    if (pp.p != 2) {
        const double work = static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(n);
        if (work > budget) throw BudgetExceeded("expsum: prime-power factor " + std::to_string(q), work, budget);
        return odd_prime_power_sum(f, pp, c);
    }
    const double work = power_work(q, n);
    if (work > budget) throw BudgetExceeded("expsum: prime-power factor " + std::to_string(q), work, budget);

    // Histogram of (F(b), b.c) mod q; the a-sum then collapses to c_q(F(b)).
    std::vector<i64> hist(static_cast<std::size_t>(q * q), 0);
    for_each_residue_vector(f, q, c, [&](i64 u, i64 v) { ++hist[u * q + v]; });

    const auto roots = roots_of_unity(q);
    std::vector<i64> ram(static_cast<std::size_t>(q));
    for (i64 u = 0; u < q; ++u) ram[u] = ramanujan(q, u);

    std::complex<double> total = 0;
    for (i64 u = 0; u < q; ++u) {
        if (ram[u] == 0) continue;
        std::complex<double> inner = 0;
        for (i64 v = 0; v < q; ++v) {
            const i64 h = hist[u * q + v];
            if (h) inner += static_cast<double>(h) * roots[v];
        }
        total += static_cast<double>(ram[u]) * inner;
    }
    return {total, q, SumMethod::crt};
}

}  // namespace

i64 ramanujan(i64 q, i64 m) {
    if (q < 1) throw std::domain_error("ramanujan: q must be positive");
    const i64 g = std::gcd(q, std::abs(m)) == 0 ? q : std::gcd(q, std::abs(m));
    // c_q(m) = sum_{d | gcd(q, m)} mu(q/d) d
    i64 total = 0;
    for (i64 d = 1; d * d <= g; ++d) {
        if (g % d) continue;
        total += mobius(q / d) * d;
        const i64 e = g / d;
        if (e != d) total += mobius(q / e) * e;
    }
    return total;
}

ExpSumValue gauss_sum(i64 p, int r, i64 m) {
    if (p < 3 || !is_prime(p)) throw std::domain_error("gauss_sum: p must be an odd prime");
    if (r < 1) throw std::domain_error("gauss_sum: r must be positive");
    const i64 q = ipow(p, r);
    const auto roots = roots_of_unity(q);
    const i64 mm = mod_floor(m, q);
    std::complex<double> total = 0;
    for (i64 a = 1; a < q; ++a) {
        int chi = legendre(a, p);
        if (chi == 0) continue;
        if (r % 2 == 0) chi = 1;
        const auto idx = static_cast<std::size_t>(static_cast<i128>(a) * mm % q);
        total += static_cast<double>(chi) * roots[idx];
    }
    return {total, q, SumMethod::brute};
}

ExpSumValue expsum_brute(const QuadraticForm& f, i64 q, std::span<const i64> c, double budget) {
    if (q < 1) throw std::domain_error("expsum_brute: q must be positive");
    if (c.size() != f.dim()) throw std::invalid_argument("expsum_brute: c has wrong length");
    const double work = power_work(q, f.dim() + 1);
    if (work > budget) throw BudgetExceeded("expsum_brute: q=" + std::to_string(q), work, budget);
    if (q == 1) return {1.0, 1, SumMethod::brute};

    const auto roots = roots_of_unity(q);
    const auto units = units_mod(q);
    std::complex<double> total = 0;
    for_each_residue_vector(f, q, c, [&](i64 u, i64 v) {
        std::complex<double> partial = 0;
        for (i64 a : units) partial += roots[(a * u + v) % q];
        total += partial;
    });
    return {total, q, SumMethod::brute};
}

ExpSumValue expsum(const QuadraticForm& f, i64 q, std::span<const i64> c, double budget) {
    if (q < 1) throw std::domain_error("expsum: q must be positive");
    if (c.size() != f.dim()) throw std::invalid_argument("expsum: c has wrong length");
    std::complex<double> product = 1.0;
    for (const auto& pp : factorize(q)) product *= prime_power_sum(f, pp, c, budget).value;
    return {product, q, SumMethod::crt};
}

DyadicAverage sigma_n_sum(const QuadraticForm& f, double x, std::span<const i64> c, double budget) {
    if (x < 2) throw std::domain_error("sigma_n_sum: x must be at least 2");
    DyadicAverage avg{x, std::vector<i64>(c.begin(), c.end()), 0.0};
    const auto lo = static_cast<i64>(std::floor(x / 2)) + 1;
    const auto hi = static_cast<i64>(std::floor(x));
    for (i64 q = lo; q <= hi; ++q) avg.total += expsum(f, q, c, budget).magnitude();
    return avg;
}

double prime_power_magnitude(const DualForm& dual, i64 p, int r, std::span<const i64> c) {
    const std::size_t n = dual.base.dim();
    const i64 q = ipow(p, r);
    const Integer fstar = dual.evaluate(c);
    const i64 fstar_mod = static_cast<i64>(((fstar % q) + q) % q);
    const i64 m = mod_floor(-static_cast<i128>(mod_inverse(4, q)) * fstar_mod % q, q);
    const double scale = std::pow(static_cast<double>(p), static_cast<double>(n * r) / 2.0);
    if ((n * r) % 2 == 0) return scale * std::abs(static_cast<double>(ramanujan(q, m)));
    return scale * gauss_sum(p, r, m).magnitude();
}

double standard_bound(const QuadraticForm& f, i64 q, double C, double eps) {
    const std::size_t n = f.dim();
    // gcd(q^n, Delta) = prod over p | q of p^{min(n v_p(q), v_p(Delta))}
    Integer disc = abs(f.discriminant());
    double g = 1;
    for (const auto& pp : factorize(q)) {
        int cap = static_cast<int>(n) * pp.r;
        while (cap > 0 && disc != 0 && disc % pp.p == 0) {
            disc /= pp.p;
            g *= static_cast<double>(pp.p);
            --cap;
        }
        if (disc == 0) g *= std::pow(static_cast<double>(pp.p), cap);
    }
    return C * std::pow(static_cast<double>(q), n / 2.0 + 1.0 + eps) * std::sqrt(g);
}

}  // namespace bqc
