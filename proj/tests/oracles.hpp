#pragma once

// Independent reference computations for the tests. Each one is written
// from the definitions with plain loops and shares no code path with the
// library routine it checks.

#include "bqc/exact.hpp"
#include "bqc/forms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using bqc::i64;
using bqc::Integer;
using Matrix = std::vector<std::vector<i64>>;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline i64 uniform_int(i64 lo, i64 hi) { return std::uniform_int_distribution<i64>(lo, hi)(rng()); }

inline Matrix random_symmetric(std::size_t n, i64 bound) {
    Matrix m(n, std::vector<i64>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m[i][j] = m[j][i] = uniform_int(-bound, bound);
    return m;
}

inline std::vector<i64> random_vector(std::size_t n, i64 bound) {
    std::vector<i64> v(n);
    for (auto& x : v) x = uniform_int(-bound, bound);
    return v;
}

// Laplace expansion along the first row.
inline Integer cofactor_det(const std::vector<std::vector<Integer>>& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    Integer total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (a[0][c] == 0) continue;
        std::vector<std::vector<Integer>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Integer> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(a[r][k]);
            minor.push_back(row);
        }
        const Integer term = a[0][c] * cofactor_det(minor);
        total += (c % 2 == 0) ? term : Integer(-term);
    }
    return total;
}

inline Integer cofactor_det(const Matrix& m) {
    std::vector<std::vector<Integer>> a(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (i64 v : m[i]) a[i].push_back(v);
    return cofactor_det(a);
}

inline i64 quad_value(const Matrix& m, const std::vector<i64>& x) {
    i64 s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) s += m[i][j] * x[i] * x[j];
    return s;
}

// Calls f on every integer vector of length n with entries in [-R, R].
inline void each_vector(std::size_t n, i64 R, const std::function<void(const std::vector<i64>&)>& f) {
    std::vector<i64> x(n);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            f(x);
            return;
        }
        for (i64 t = -R; t <= R; ++t) {
            x[i] = t;
            rec(i + 1);
        }
    };
    rec(0);
}

inline i64 box_zeros(const Matrix& m, i64 R) {
    i64 count = 0;
    each_vector(m.size(), R, [&](const std::vector<i64>& x) { count += quad_value(m, x) == 0; });
    return count;
}

// #{x mod q : F(x) = 0 mod q}
inline i64 count_mod(const Matrix& m, i64 q) {
    const std::size_t n = m.size();
    i64 count = 0;
    std::vector<i64> x(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            __int128 s = 0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) s += static_cast<__int128>(m[a][b]) * x[a] * x[b];
            count += (s % q) == 0;
            return;
        }
        for (i64 t = 0; t < q; ++t) {
            x[i] = t;
            rec(i + 1);
        }
    };
    rec(0);
    return count;
}

inline std::complex<double> e_q(i64 t, i64 q) {
    const i64 r = ((t % q) + q) % q;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q));
}

// sum_{(a,q)=1} sum_{b mod q} e_q(a F(b) + b.c)
inline std::complex<double> expsum(const Matrix& m, i64 q, const std::vector<i64>& c) {
    const std::size_t n = m.size();
    std::complex<double> total = 0;
    std::vector<i64> b(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            const i64 f = quad_value(m, b) % q;
            i64 dot = 0;
            for (std::size_t k = 0; k < n; ++k) dot += b[k] * c[k];
            for (i64 a = 1; a <= q; ++a)
                if (std::gcd(a, q) == 1) total += e_q(a * f + dot, q);
            return;
        }
        for (i64 t = 0; t < q; ++t) {
            b[i] = t;
            rec(i + 1);
        }
    };
    rec(0);
    return total;
}

// Biquadratic value straight from the coefficient table.
inline Integer biquad_value(const bqc::BiquadraticForm& b, const std::vector<i64>& x, const std::vector<i64>& y) {
    Integer s = 0;
    for (const auto& [idx, c] : b.coeffs()) s += c * x[idx[0]] * x[idx[1]] * y[idx[2]] * y[idx[3]];
    return s;
}

// 2G for the slice in y (x fixed) or in x (y fixed), from the coefficient table.
inline Matrix doubled_slice(const bqc::BiquadraticForm& b, const std::vector<i64>& v, bool fix_x) {
    const std::size_t n = b.dim();
    Matrix g(n, std::vector<i64>(n, 0));
    for (const auto& [idx, cI] : b.coeffs()) {
        const i64 c = static_cast<i64>(cI);
        const i64 w = fix_x ? c * v[idx[0]] * v[idx[1]] : c * v[idx[2]] * v[idx[3]];
        const int k = fix_x ? idx[2] : idx[0], l = fix_x ? idx[3] : idx[1];
        if (k == l)
            g[k][k] += 2 * w;
        else {
            g[k][l] += w;
            g[l][k] += w;
        }
    }
    return g;
}

inline i64 sup(const std::vector<i64>& v) {
    i64 s = 0;
    for (i64 x : v) s = std::max(s, std::abs(x));
    return s;
}

inline bool reduced(const std::vector<i64>& v) {
    i64 g = 0;
    for (i64 x : v) g = std::gcd(g, x);
    if (g != 1) return false;
    for (i64 x : v)
        if (x != 0) return x > 0;
    return false;
}

// N_U by double enumeration; `signs` counts all four sign classes.
inline i64 count_NU(const bqc::BiquadraticForm& b, i64 R, bool signs = false) {
    const std::size_t n = b.dim();
    i64 count = 0;
    each_vector(n, R, [&](const std::vector<i64>& x) {
        const i64 kx = sup(x);
        if (kx == 0) return;
        i64 gx = 0;
        for (i64 t : x) gx = std::gcd(gx, t);
        if (gx != 1) return;
        if (!signs && !reduced(x)) return;
        if (cofactor_det(doubled_slice(b, x, true)) == 0) return;
        each_vector(n, R / kx, [&](const std::vector<i64>& y) {
            if (sup(y) == 0) return;
            i64 g = 0;
            for (i64 t : y) g = std::gcd(g, t);
            if (g != 1) return;
            if (!signs && !reduced(y)) return;
            if (biquad_value(b, x, y) != 0) return;
            if (cofactor_det(doubled_slice(b, y, false)) == 0) return;
            ++count;
        });
    });
    return count;
}

// Pairs (x, y) with |x| <= X, |y| <= Y, F = 0, x in A_1 and (if both) y in A_2.
inline i64 count_pairs(const bqc::BiquadraticForm& b, i64 X, i64 Y, bool both) {
    const std::size_t n = b.dim();
    i64 count = 0;
    each_vector(n, X, [&](const std::vector<i64>& x) {
        if (cofactor_det(doubled_slice(b, x, true)) == 0) return;
        each_vector(n, Y, [&](const std::vector<i64>& y) {
            if (biquad_value(b, x, y) != 0) return;
            if (both && cofactor_det(doubled_slice(b, y, false)) == 0) return;
            ++count;
        });
    });
    return count;
}

// Joint series term sum_{(a,q)=1} sum_{x,y mod q} e(a F(x;y)/q) by direct summation.
inline std::complex<double> joint_term(const bqc::BiquadraticForm& b, i64 q) {
    const std::size_t n = b.dim();
    std::complex<double> total = 0;
    std::vector<i64> x(n, 0), y(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == 2 * n) {
            const Integer f = biquad_value(b, x, y);
            const i64 fm = static_cast<i64>(((f % q) + q) % q);
            for (i64 a = 1; a <= q; ++a)
                if (std::gcd(a, q) == 1) total += e_q(a * fm, q);
            return;
        }
        auto& v = i < n ? x[i] : y[i - n];
        for (i64 t = 0; t < q; ++t) {
            v = t;
            rec(i + 1);
        }
    };
    rec(0);
    return total;
}

inline double ramanujan_direct(i64 q, i64 m) {
    std::complex<double> s = 0;
    for (i64 a = 1; a <= q; ++a)
        if (std::gcd(a, q) == 1) s += e_q(a * (m % q), q);
    return s.real();
}

inline int legendre_euler(i64 a, i64 p) {
    a = ((a % p) + p) % p;
    if (a == 0) return 0;
    i64 r = 1, b = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

// sum_{a mod p^r} (a/p)^r e(a m / p^r)
inline std::complex<double> gauss_direct(i64 p, int r, i64 m) {
    i64 q = 1;
    for (int k = 0; k < r; ++k) q *= p;
    std::complex<double> s = 0;
    for (i64 a = 1; a < q; ++a) {
        int chi = legendre_euler(a, p);
        if (chi == 0) continue;
        if (r % 2 == 0) chi = 1;
        s += static_cast<double>(chi) * e_q(a * (((m % q) + q) % q) % q, q);
    }
    return s;
}

// c^T adj(M) c with cofactors from the Laplace-expansion determinant.
inline Integer dual_value(const Matrix& m, const std::vector<i64>& c) {
    const std::size_t n = m.size();
    Integer s = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Matrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<i64> row;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i) row.push_back(m[r][k]);
                minor.push_back(row);
            }
            const Integer cof = ((i + j) % 2 ? -1 : 1) * cofactor_det(minor);
            s += cof * c[i] * c[j];
        }
    return s;
}

// p^{nr/2} |c_{p^r}(m)| or p^{nr/2} |g_{p^r}(m)| with m = -(4^{-1}) F*(c) mod p^r.
inline double lemma_magnitude(const Matrix& mat, i64 p, int r, const std::vector<i64>& c) {
    const std::size_t n = mat.size();
    i64 q = 1;
    for (int k = 0; k < r; ++k) q *= p;
    i64 inv4 = 1;
    while ((4 * inv4) % q != 1) ++inv4;
    const Integer fs = dual_value(mat, c);
    const i64 f = static_cast<i64>(((fs % q) + q) % q);
    const i64 m = ((-inv4 * f) % q + q) % q;
    const double scale = std::pow(static_cast<double>(p), static_cast<double>(n * r) / 2.0);
    if ((n * r) % 2 == 0) return scale * std::abs(ramanujan_direct(q, m));
    return scale * std::abs(gauss_direct(p, r, m));
}

inline double zeta_direct(double s, i64 terms) {
    long double total = 0;
    for (i64 k = terms; k >= 1; --k) total += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
    return static_cast<double>(total);
}

struct Quadrature {
    double value = 0;
    double uncertainty = 0;
};

// sigma_inf(w0(1); F) by the coarea formula: solving F = 0 for a pivot
// coordinate t gives density (#roots t in [-1,1]) / sqrt(disc) on the
// remaining variables. The innermost variable is integrated by Gauss-Legendre
// between the points where the root count changes.
class CoareaIntegral {
public:
    explicit CoareaIntegral(const Matrix& mi) : m_(mi) {
        // The (pivot, inner) block must be indefinite; a definite block makes
        // the fiber integral jump at the edge of its ellipse.
        const std::size_t n = mi.size();
        double best = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || mi[i][i] == 0) continue;
                const double det = M(i, i) * M(j, j) - M(i, j) * M(i, j);
                if (det < best) {
                    best = det;
                    s_ = i;
                    u_ = j;
                }
            }
        if (best == 0) throw std::invalid_argument("CoareaIntegral: no indefinite coordinate pair");
        for (std::size_t i = 0; i < n; ++i)
            if (i != s_ && i != u_) outer_.push_back(i);
    }

    // Integral over the innermost variable for fixed outer coordinates z. On
    // each piece with a fixed root count the integrand is 1/sqrt(quadratic),
    // which has a closed-form antiderivative, so the fiber is exact up to rounding.
    double fiber(const std::vector<double>& z) const {
        const auto [b0, c0, c1] = coefficients(z);
        const double a = M(s_, s_), b1 = 2 * M(s_, u_), c2 = M(u_, u_);
        const double D2 = b1 * b1 - 4 * a * c2, D1 = 2 * b0 * b1 - 4 * a * c1, D0 = b0 * b0 - 4 * a * c0;
        std::vector<double> cuts = {-1.0, 1.0};
        real_roots(D2, D1, D0, cuts);
        for (double sign : {1.0, -1.0}) real_roots(c2, sign * b1 + c1, a + sign * b0 + c0, cuts);
        std::vector<double> pts;
        for (double c : cuts)
            if (c >= -1 && c <= 1) pts.push_back(c);
        std::sort(pts.begin(), pts.end());
        auto disc = [&](double v) { return D0 + D1 * v + D2 * v * v; };
        auto roots_in_box = [&](double v) {
            const double d = disc(v);
            if (d <= 0) return 0;
            const double bb = b0 + b1 * v, sq = std::sqrt(d);
            int cnt = 0;
            for (double t : {(-bb + sq) / (2 * a), (-bb - sq) / (2 * a)}) cnt += (t >= -1 && t <= 1);
            return cnt;
        };
        // With w = 2 D2 v + D1 and K = D1^2 - 4 D2 D0, disc = (w^2 - K) / (4 D2).
        const double K = D1 * D1 - 4 * D2 * D0;
        auto antiderivative = [&](double v, double mid) {
            if (D2 == 0) return D1 != 0 ? 2 * std::sqrt(std::max(disc(v), 0.0)) / D1 : v / std::sqrt(D0);
            const double w = 2 * D2 * v + D1;
            if (D2 < 0) return -std::asin(std::clamp(w / std::sqrt(K), -1.0, 1.0)) / std::sqrt(-D2);
            if (K < 0) return std::asinh(w / std::sqrt(-K)) / std::sqrt(D2);
            // |w| >= sqrt(K) on the whole piece; the side is taken from its midpoint.
            const double side = 2 * D2 * mid + D1 >= 0 ? 1.0 : -1.0;
            if (K == 0) return side * std::log(std::abs(w)) / std::sqrt(D2);
            return side * std::acosh(std::max(std::abs(w) / std::sqrt(K), 1.0)) / std::sqrt(D2);
        };
        double total = 0;
        for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
            const double lo = pts[p], hi = pts[p + 1];
            if (hi - lo < 1e-15) continue;
            const double mid = 0.5 * (lo + hi);
            const int cnt = roots_in_box(mid);
            if (cnt == 0) continue;
            total += cnt * (antiderivative(hi, mid) - antiderivative(lo, mid));
        }
        // Infinite only on a null set of z (a double root at a piece end).
        return std::isfinite(total) ? total : 0.0;
    }

    // Adaptive Gauss-Kronrod over the last outer coordinate, split where the fiber has
    // logarithmic peaks, and an m-point midpoint rule over the others.
    // Integrating one variable out first smooths the kinks of `fiber` enough
    // for the midpoint rule.
    double integrate(int m) const {
        const std::size_t k = outer_.size();
        std::vector<double> z(k);
        std::vector<int> idx(k - 1, 0);
        const double h = 2.0 / m;
        double total = 0;
        while (true) {
            for (std::size_t j = 0; j + 1 < k; ++j) z[j] = -1 + (idx[j] + 0.5) * h;
            std::vector<double> pts = {-1.0, 1.0};
            for (double x : peaks(z))
                if (x > -1 && x < 1) pts.push_back(x);
            std::sort(pts.begin(), pts.end());
            for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
                if (pts[p + 1] - pts[p] < 1e-15) continue;
                total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                    [&](double v) {
                        z[k - 1] = v;
                        return fiber(z);
                    },
                    pts[p], pts[p + 1], 10, 1e-7);
            }
            std::size_t j = 0;
            while (j + 1 < k && idx[j] == m - 1) idx[j++] = 0;
            if (j + 1 >= k) break;
            ++idx[j];
        }
        return total * std::pow(h, static_cast<double>(k - 1));
    }

private:
    // Coefficients of F = a t^2 + (b0 + b1 v) t + (c0 + c1 v + c2 v^2) in the pivot t and inner v.
    std::array<double, 3> coefficients(const std::vector<double>& z) const {
        double b0 = 0, c0 = 0, c1 = 0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            b0 += 2 * M(s_, outer_[j]) * z[j];
            c1 += 2 * M(u_, outer_[j]) * z[j];
            for (std::size_t l = 0; l < z.size(); ++l) c0 += M(outer_[j], outer_[l]) * z[j] * z[l];
        }
        return {b0, c0, c1};
    }

    // Values of the last outer coordinate where disc(v) acquires a double root
    // (K = 0); K is quadratic there, so three samples determine it.
    std::vector<double> peaks(std::vector<double> z) const {
        const double a = M(s_, s_), b1 = 2 * M(s_, u_), c2 = M(u_, u_);
        const double D2 = b1 * b1 - 4 * a * c2;
        auto K = [&](double x) {
            z.back() = x;
            const auto [b0, c0, c1] = coefficients(z);
            const double D1 = 2 * b0 * b1 - 4 * a * c1, D0 = b0 * b0 - 4 * a * c0;
            return D1 * D1 - 4 * D2 * D0;
        };
        const double km = K(-1), k0 = K(0), kp = K(1);
        std::vector<double> out;
        real_roots(0.5 * (kp + km) - k0, 0.5 * (kp - km), k0, out);
        return out;
    }

    double M(std::size_t i, std::size_t j) const { return static_cast<double>(m_[i][j]); }

    static void real_roots(double A, double B, double C, std::vector<double>& out) {
        if (A == 0) {
            if (B != 0) out.push_back(-C / B);
            return;
        }
        const double disc = B * B - 4 * A * C;
        if (disc < 0) return;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
        if (q != 0) out.push_back(C / q);
        out.push_back(q / A);
    }

    Matrix m_;
    std::size_t s_ = 0, u_ = 1;
    std::vector<std::size_t> outer_;
};

// Uncertainty is |Q_m - Q_{m/2}|.
inline Quadrature sigma_box(const Matrix& m, int grid) {
    const CoareaIntegral c(m);
    const double fine = c.integrate(grid), coarse = c.integrate(grid / 2);
    return {fine, std::abs(fine - coarse)};
}

// sigma^{(delta)} for F = x1^2y1^2 + x2^2y2^2 + x3^2y3^2 over [-1,1]^6, from
// w_i = x_i y_i (density -log w on [0,1]) and the closed form
// int_0^a (a^2 - w^2)(-log w) dw = a^3 (8/9 - (2/3) log a).
inline double sigma_delta_diag3(double delta) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto inner = [](double a) { return a <= 0 ? 0.0 : a * a * a * (8.0 / 9.0 - (2.0 / 3.0) * std::log(a)); };
    const double rmax = std::sqrt(delta);
    const double val = ts.integrate(
        [&](double phi) {
            return ts.integrate(
                [&](double rho) {
                    const double a2 = delta - rho * rho;
                    const double w1 = rho * std::cos(phi), w2 = rho * std::sin(phi);
                    if (a2 <= 0 || !(w1 > 0) || !(w2 > 0)) return 0.0;
                    return rho * std::log(w1) * std::log(w2) * inner(std::sqrt(a2));
                },
                0.0, rmax);
        },
        0.0, std::numbers::pi / 2);
    return 64.0 / (delta * delta) * val;
}

}  // namespace oracle
