#include "bqc/quadric_count.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bqc {

namespace {

constexpr std::array<bool, 64> kSquareMod64 = [] {
    std::array<bool, 64> t{};
    for (int i = 0; i < 64; ++i) t[(i * i) % 64] = true;
    return t;
}();

template <class Int>
Int int_sqrt(Int v) {
    if constexpr (std::is_same_v<Int, i64>)
        return isqrt(v);
    else
        return isqrt128(v);
}

void check_args(std::span<const i64> gram, std::size_t n, i64 R) {
    if (n < 1 || gram.size() != n * n) throw std::invalid_argument("count_zeros_box: gram has wrong size");
    if (R < 0) throw std::invalid_argument("count_zeros_box: R must be nonnegative");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (gram[i * n + j] != gram[j * n + i]) throw std::invalid_argument("count_zeros_box: gram not symmetric");
}

// Fiber geometry: pivot s is solved for, u is the innermost enumerated
// coordinate, `outer` holds the rest.
struct Layout {
    std::size_t s = 0, u = 0;
    std::vector<std::size_t> outer;
};

Layout make_layout(std::span<const i64> m, std::size_t n) {
    Layout l;
    for (std::size_t i = 0; i < n; ++i)
        if (m[i * n + i] != 0) {
            l.s = i;
            break;
        }
    bool have_u = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == l.s) continue;
        if (!have_u) {
            l.u = i;
            have_u = true;
        } else {
            l.outer.push_back(i);
        }
    }
    return l;
}

long double discriminant_bound(std::span<const i64> m, std::size_t n, std::size_t s, i64 R) {
    const long double r = static_cast<long double>(R);
    long double bb = 0, cb = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == s) continue;
        bb += 2.0L * std::abs(static_cast<long double>(m[s * n + j])) * r;
        for (std::size_t l = 0; l < n; ++l)
            if (l != s) cb += std::abs(static_cast<long double>(m[j * n + l])) * r * r;
    }
    return bb * bb + 4.0L * std::abs(static_cast<long double>(m[s * n + s])) * cb;
}

// Enumerates the box by fibers. With kVisit, `visit` receives each zero;
// otherwise zeros are only counted. Returns the count.
template <class Int, bool kVisit>
i64 slice_enumerate(std::span<const i64> m, std::size_t n, i64 R, const ZeroVisitor& visit) {
    const Layout lay = make_layout(m, n);
    const std::size_t s = lay.s, u = lay.u;
    const std::size_t k = lay.outer.size();
    auto M = [&](std::size_t i, std::size_t j) { return static_cast<Int>(m[i * n + j]); };

    const Int a = M(s, s);
    const Int b1 = 2 * M(s, u);
    const Int c2 = M(u, u);
    const Int D2 = b1 * b1 - 4 * a * c2;

    std::vector<i64> z(k, -R);
    if (k > 0) z[0] = 0;  // x -> -x symmetry on the first outer coordinate
    std::vector<i64> x(n, 0), neg(n, 0);
    i64 total = 0;

    auto emit = [&](i64 t, i64 uu, i64 mult) {
        total += mult;
        if constexpr (kVisit) {
            x[s] = t;
            x[u] = uu;
            for (std::size_t j = 0; j < k; ++j) x[lay.outer[j]] = z[j];
            visit(x);
            if (mult == 2) {
                for (std::size_t i = 0; i < n; ++i) neg[i] = -x[i];
                visit(neg);
            }
        }
    };

    while (true) {
        const i64 mult = (k > 0 && z[0] != 0) ? 2 : 1;
        Int b0 = 0, c0 = 0, c1 = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const Int zj = z[j];
            b0 += 2 * M(s, lay.outer[j]) * zj;
            c1 += 2 * M(u, lay.outer[j]) * zj;
            Int row = 0;
            for (std::size_t l = 0; l < k; ++l) row += M(lay.outer[j], lay.outer[l]) * z[l];
            c0 += row * zj;
        }

        if (a == 0) {
            // Every diagonal entry vanishes: b t + c = 0 in the pivot.
            for (i64 uu = -R; uu <= R; ++uu) {
                const Int b = b0 + b1 * uu;
                const Int c = c0 + c1 * uu + c2 * uu * uu;
                if (b != 0) {
                    if (c % b != 0) continue;
                    const Int t = -c / b;
                    if (t >= -R && t <= R) emit(static_cast<i64>(t), uu, mult);
                } else if (c == 0) {
                    for (i64 t = -R; t <= R; ++t) emit(t, uu, mult);
                }
            }
        } else {
            const Int D0 = b0 * b0 - 4 * a * c0;
            const Int D1 = 2 * b0 * b1 - 4 * a * c1;
            auto D_at = [&](i64 v) { return D0 + D1 * v + D2 * v * v; };
            i64 lo = -R, hi = R;
            bool empty = false;
            if (D2 < 0) {
                // {D >= 0} is an interval; locate it, then fix the ends exactly.
                const long double vertex = -static_cast<long double>(D1) / (2.0L * static_cast<long double>(D2));
                i64 start = static_cast<i64>(std::floor(std::max<long double>(-R, std::min<long double>(R, vertex))));
                if (start < R && D_at(start + 1) > D_at(start)) ++start;
                if (D_at(start) < 0) {
                    empty = true;
                } else {
                    const long double disc = static_cast<long double>(D1) * static_cast<long double>(D1) -
                                             4.0L * static_cast<long double>(D2) * static_cast<long double>(D0);
                    const long double root = std::sqrt(std::max<long double>(disc, 0));
                    const long double r1 = (-static_cast<long double>(D1) + root) / (2.0L * static_cast<long double>(D2));
                    const long double r2 = (-static_cast<long double>(D1) - root) / (2.0L * static_cast<long double>(D2));
                    lo = static_cast<i64>(std::max<long double>(-R, std::min<long double>(start, std::ceil(std::min(r1, r2)))));
                    hi = static_cast<i64>(std::min<long double>(R, std::max<long double>(start, std::floor(std::max(r1, r2)))));
                    while (lo > -R && D_at(lo - 1) >= 0) --lo;
                    while (D_at(lo) < 0) ++lo;
                    while (hi < R && D_at(hi + 1) >= 0) ++hi;
                    while (D_at(hi) < 0) --hi;
                }
            }
            if (!empty) {
                Int D = D_at(lo);
                Int step = D1 + D2 * (2 * static_cast<Int>(lo) + 1);
                Int b = b0 + b1 * lo;
                const Int den = 2 * a;
                for (i64 uu = lo; uu <= hi; ++uu) {
                    if (D >= 0 && kSquareMod64[static_cast<unsigned>(D & 63)]) {
                        const Int d = int_sqrt(D);
                        if (d * d == D) {
                            auto root = [&](Int num) {
                                if (num % den != 0) return;
                                const Int t = num / den;
                                if (t >= -R && t <= R) emit(static_cast<i64>(t), uu, mult);
                            };
                            root(-b + d);
                            if (d != 0) root(-b - d);
                        }
                    }
                    D += step;
                    step += 2 * D2;
                    b += b1;
                }
            }
        }

        std::size_t j = 0;
        while (j < k && z[j] == R) {
            z[j] = (j == 0) ? 0 : -R;
            ++j;
        }
        if (j == k) break;
        ++z[j];
    }
    return total;
}

i64 naive_count(std::span<const i64> m, std::size_t n, i64 R) {
    std::vector<i64> x(n, -R);
    i64 total = 0;
    while (true) {
        i128 f = 0;
        for (std::size_t i = 0; i < n; ++i) {
            i128 row = 0;
            for (std::size_t j = 0; j < n; ++j) row += static_cast<i128>(m[i * n + j]) * x[j];
            f += row * x[i];
        }
        if (f == 0) ++total;
        std::size_t j = 0;
        while (j < n && x[j] == R) x[j++] = -R;
        if (j == n) break;
        ++x[j];
    }
    return total;
}

template <bool kVisit>
i64 dispatch(std::span<const i64> m, std::size_t n, i64 R, const ZeroVisitor& visit) {
    const Layout lay = make_layout(m, n);
    if (discriminant_bound(m, n, lay.s, R) < 0x1.0p60L) return slice_enumerate<i64, kVisit>(m, n, R, visit);
    if (discriminant_bound(m, n, lay.s, R) < 0x1.0p124L) return slice_enumerate<i128, kVisit>(m, n, R, visit);
    throw std::overflow_error("count_zeros_box: discriminant exceeds 128 bits");
}

}  // namespace

const char* to_string(CountMethod method) { return method == CountMethod::naive ? "naive" : "slice"; }

double box_work(std::size_t n, i64 R, CountMethod method) {
    const double side = 2.0 * static_cast<double>(R) + 1.0;
    const std::size_t e = (method == CountMethod::naive || n < 2) ? n : n - 1;
    return std::pow(side, static_cast<double>(e));
}

i64 count_zeros_box(std::span<const i64> gram, std::size_t n, i64 R, CountMethod method, double budget) {
    check_args(gram, n, R);
    const double work = box_work(n, R, method);
    if (work > budget) throw BudgetExceeded(std::string("count_zeros_box (") + to_string(method) + ")", work, budget);
    if (method == CountMethod::naive || n < 2) return naive_count(gram, n, R);
    return dispatch<false>(gram, n, R, {});
}

void for_each_zero_box(std::span<const i64> gram, std::size_t n, i64 R, const ZeroVisitor& visit, double budget) {
    check_args(gram, n, R);
    if (n < 2) {
        // 1-variable form: zeros are x = 0, or everything when M = 0.
        for (i64 t = -R; t <= R; ++t)
            if (t == 0 || gram[0] == 0) {
                const i64 v[1] = {t};
                visit(v);
            }
        return;
    }
    const double work = box_work(n, R, CountMethod::slice);
    if (work > budget) throw BudgetExceeded("for_each_zero_box", work, budget);
    dispatch<true>(gram, n, R, visit);
}

}  // namespace bqc
