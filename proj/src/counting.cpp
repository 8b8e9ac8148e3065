#include "bqc/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bqc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool canonical(std::span<const i64> v) {
    for (i64 c : v)
        if (c != 0) return c > 0;
    return false;
}

bool primitive(std::span<const i64> v) { return gcd_of(v) == 1; }

// Visits every v in Z^n with |v| <= R.
template <class Visit>
void for_each_box(std::size_t n, i64 R, Visit&& visit) {
    std::vector<i64> v(n, -R);
    while (true) {
        visit(std::span<const i64>(v));
        std::size_t j = 0;
        while (j < n && v[j] == R) v[j++] = -R;
        if (j == n) return;
        ++v[j];
    }
}

double shell_size(std::size_t n, i64 k) {
    const double d = static_cast<double>(n);
    return std::pow(2.0 * k + 1, d) - std::pow(2.0 * k - 1, d);
}

CountRecord make_record(std::string method, std::vector<std::pair<std::string, double>> params, i64 count,
                        Clock::time_point start) {
    CountRecord rec;
    rec.method = std::move(method);
    rec.params = std::move(params);
    rec.count = count;
    rec.value = static_cast<double>(count);
    rec.seconds = seconds_since(start);
    return rec;
}

using Keep = bool (*)(std::span<const i64>);
using PairVisit = std::function<void(std::span<const i64>, std::span<const i64>)>;

bool keep_all(std::span<const i64>) { return true; }
bool keep_primitive(std::span<const i64> v) { return primitive(v); }
bool keep_reduced(std::span<const i64> v) { return canonical(v) && primitive(v); }

double pair_work(std::size_t n, i64 Rf) {
    double work = 0;
    for (i64 k = 1; k * k <= Rf; ++k) work += shell_size(n, k) * box_work(n, Rf / k, CountMethod::slice);
    return 2 * work;
}

// Pairs (outer, inner) with 1 <= |outer| <= sqrt(Rf), |inner| >= |outer|
// (strictly when `strict`), |outer||inner| <= Rf, both slices nonsingular.
void half_pairs(const BiquadraticForm& form, i64 Rf, bool strict, Keep keep, const PairVisit& visit) {
    const std::size_t n = form.dim();
    const i64 K = isqrt(Rf);
    std::vector<i64> gram(n * n), inner_gram(n * n);
    const double unlimited = std::numeric_limits<double>::infinity();
    for_each_box(n, K, [&](std::span<const i64> v) {
        const i64 k = sup_norm(v);
        if (k == 0 || !keep(v)) return;
        doubled_slice_x(form, v, gram);
        if (determinant_is_zero_i64(gram, n)) return;
        for_each_zero_box(
            gram, n, Rf / k,
            [&](std::span<const i64> w) {
                const i64 l = sup_norm(w);
                if (strict ? l <= k : l < k) return;
                if (!keep(w)) return;
                doubled_slice_y(form, w, inner_gram);
                if (determinant_is_zero_i64(inner_gram, n)) return;
                visit(v, w);
            },
            unlimited);
    });
}

// Every (x, y) in A with F(x;y) = 0 and |x||y| <= Rf whose sides pass `keep`.
void for_each_A_pair(const BiquadraticForm& b, i64 Rf, Keep keep, const PairVisit& visit, double budget,
                     const char* what) {
    const double work = pair_work(b.dim(), Rf);
    if (work > budget) throw BudgetExceeded(what, work, budget);
    if (Rf < 1) return;
    half_pairs(b, Rf, false, keep, visit);
    const BiquadraticForm bt = b.transposed();
    half_pairs(bt, Rf, true, keep, [&](std::span<const i64> y, std::span<const i64> x) { visit(x, y); });
}

i64 floor_bound(double R) {
    if (!(R >= 0)) throw std::invalid_argument("pair bound must be nonnegative");
    if (R >= 9e15) throw std::overflow_error("pair bound too large");
    return static_cast<i64>(std::floor(R));
}

}  // namespace

double CountRecord::param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw std::out_of_range("CountRecord: no parameter " + key);
}

i64 HeightParams::pair_bound() const {
    if (n < 3) throw std::domain_error("HeightParams: n must be at least 3");
    if (!(bound >= 0)) throw std::invalid_argument("HeightParams: bound must be nonnegative");
    const int e = exponent();
    i64 r = static_cast<i64>(std::floor(std::pow(bound, 1.0 / e)));
    auto fits = [&](i64 t) { return std::pow(static_cast<long double>(t), e) <= static_cast<long double>(bound); };
    while (r > 0 && !fits(r)) --r;
    while (fits(r + 1)) ++r;
    return r;
}

const char* to_string(NURoute route) { return route == NURoute::direct ? "direct" : "mobius"; }

CountRecord count_quadric_box(const QuadraticForm& f, i64 B, CountMethod method, double budget) {
    const auto start = Clock::now();
    const i64 count = count_zeros_box(f.gram_i64(), f.dim(), B, method, budget);
    return make_record(to_string(method), {{"B", static_cast<double>(B)}}, count, start);
}

CountRecord count_quadric_weighted(const QuadraticForm& f, const WeightFunction& w, double B, double budget) {
    if (!(B > 0)) throw std::invalid_argument("count_quadric_weighted: B must be positive");
    const auto start = Clock::now();
    const std::size_t n = f.dim();
    const i64 R = floor_bound(w.support_radius() * B) + 1;
    double sum = 0;
    i64 visited = 0;
    std::vector<double> u(n);
    for_each_zero_box(
        f.gram_i64(), n, R,
        [&](std::span<const i64> x) {
            double value;
            if (w.kind() == WeightKind::custom) {
                for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<double>(x[i]) / B;
                value = w(u);
            } else {
                value = w.radial(static_cast<double>(sup_norm(x)) / B);
            }
            if (value != 0) {
                sum += value;
                ++visited;
            }
        },
        budget);
    auto rec = make_record("slice", {{"B", B}, {"eta", w.eta()}}, visited, start);
    rec.method = "weighted:" + w.name();
    rec.value = sum;
    rec.weighted = true;
    return rec;
}

CountRecord count_Nx(const BiquadraticForm& b, std::span<const i64> x, i64 Y, double budget) {
    const auto start = Clock::now();
    const std::size_t n = b.dim();
    if (x.size() != n) throw std::invalid_argument("count_Nx: x has wrong length");
    std::vector<i64> gram(n * n);
    doubled_slice_x(b, x, gram);
    const auto method = n >= 3 ? CountMethod::slice : CountMethod::naive;
    const i64 count = count_zeros_box(gram, n, Y, method, budget);
    return make_record(to_string(method), {{"Y", static_cast<double>(Y)}}, count, start);
}

CountRecord count_A(const BiquadraticForm& b, i64 X, i64 Y, double budget) {
    const auto start = Clock::now();
    const std::size_t n = b.dim();
    const double work = box_work(n, X, CountMethod::naive) * box_work(n, Y, CountMethod::slice);
    if (work > budget) throw BudgetExceeded("count_A", work, budget);
    std::vector<i64> gram(n * n), ygram(n * n);
    i64 count = 0;
    for_each_box(n, X, [&](std::span<const i64> x) {
        doubled_slice_x(b, x, gram);
        if (determinant_is_zero_i64(gram, n)) return;
        for_each_zero_box(
            gram, n, Y,
            [&](std::span<const i64> y) {
                doubled_slice_y(b, y, ygram);
                if (!determinant_is_zero_i64(ygram, n)) ++count;
            },
            work);
    });
    return make_record("A", {{"X", static_cast<double>(X)}, {"Y", static_cast<double>(Y)}}, count, start);
}

CountRecord count_tilde(const BiquadraticForm& b, i64 X, i64 Y, double budget) {
    const auto start = Clock::now();
    const std::size_t n = b.dim();
    const auto method = n >= 3 ? CountMethod::slice : CountMethod::naive;
    const double work = box_work(n, X, CountMethod::naive) * box_work(n, Y, method);
    if (work > budget) throw BudgetExceeded("count_tilde", work, budget);
    std::vector<i64> gram(n * n);
    i64 count = 0;
    for_each_box(n, X, [&](std::span<const i64> x) {
        doubled_slice_x(b, x, gram);
        if (determinant_is_zero_i64(gram, n)) return;
        count += count_zeros_box(gram, n, Y, method, work);
    });
    return make_record("tilde", {{"X", static_cast<double>(X)}, {"Y", static_cast<double>(Y)}}, count, start);
}

CountRecord count_NU(const BiquadraticForm& b, double height_bound, NURoute route, double budget) {
    const auto start = Clock::now();
    const HeightParams h{b.dim(), height_bound};
    const i64 Rf = h.pair_bound();
    i64 count = 0;
    if (route == NURoute::direct) {
        for_each_A_pair(b, Rf, keep_reduced, [&](auto, auto) { ++count; }, budget, "count_NU (direct)");
    } else {
        // One enumeration of all pairs in A gives M at every R/(k1 k2).
        std::vector<i64> products;
        for_each_A_pair(
            b, Rf, keep_all, [&](std::span<const i64> x, std::span<const i64> y) {
                products.push_back(sup_norm(x) * sup_norm(y));
            },
            budget, "count_NU (mobius)");
        std::sort(products.begin(), products.end());
        auto M = [&](i64 r) {
            return static_cast<i64>(std::upper_bound(products.begin(), products.end(), r) - products.begin());
        };
        i64 total = 0;
        for (i64 k1 = 1; k1 <= Rf; ++k1) {
            const int m1 = mobius(k1);
            if (m1 == 0) continue;
            for (i64 k2 = 1; k1 * k2 <= Rf; ++k2) {
                const int m2 = mobius(k2);
                if (m2 != 0) total += m1 * m2 * M(Rf / (k1 * k2));
            }
        }
        if (total % 4 != 0) throw std::logic_error("count_NU: Mobius sum not divisible by 4");
        count = total / 4;
    }
    return make_record(to_string(route), {{"H", height_bound}, {"R", static_cast<double>(Rf)}}, count, start);
}

CountRecord count_NU_signed(const BiquadraticForm& b, double height_bound, double budget) {
    const auto start = Clock::now();
    const i64 Rf = HeightParams{b.dim(), height_bound}.pair_bound();
    i64 count = 0;
    for_each_A_pair(b, Rf, keep_primitive, [&](auto, auto) { ++count; }, budget, "count_NU_signed");
    return make_record("signed", {{"H", height_bound}, {"R", static_cast<double>(Rf)}}, count, start);
}

CountRecord mobius_M(const BiquadraticForm& b, double R, double budget) {
    const auto start = Clock::now();
    const i64 Rf = floor_bound(R);
    i64 count = 0;
    for_each_A_pair(b, Rf, keep_all, [&](auto, auto) { ++count; }, budget, "mobius_M");
    return make_record("M", {{"R", R}}, count, start);
}

std::vector<DyadicCell> dyadic_cells(const BiquadraticForm& b, double R, double xi, double budget) {
    if (!(xi > 0)) throw std::invalid_argument("dyadic_cells: xi must be positive");
    const i64 Rf = floor_bound(R);
    const std::size_t n = b.dim();
    // Integer range of |v| in cell i.
    auto cell_range = [&](int i) {
        const i64 hi = static_cast<i64>(std::floor(std::pow(1 + xi, i)));
        const i64 lo = i == 0 ? 1 : static_cast<i64>(std::floor(std::pow(1 + xi, i - 1))) + 1;
        return std::pair<i64, i64>{lo, hi};
    };
    int cells = 0;
    while (cell_range(cells).first <= Rf) ++cells;

    std::vector<DyadicCell> out;
    std::vector<i64> gram(n * n), ygram(n * n);
    double work = 0;
    for (int i = 0; i < cells; ++i) {
        const auto [xlo, xhi] = cell_range(i);
        for (int j = 0; j < cells; ++j) {
            const auto [ylo, yhi] = cell_range(j);
            DyadicCell cell{i, j, 0};
            if (xlo <= xhi && ylo <= yhi && xlo * ylo <= Rf) {
                work += box_work(n, xhi, CountMethod::naive) * box_work(n, std::min(yhi, Rf / xlo), CountMethod::slice);
                if (work > budget) throw BudgetExceeded("dyadic_cells", work, budget);
                for_each_box(n, xhi, [&](std::span<const i64> x) {
                    const i64 k = sup_norm(x);
                    if (k < xlo) return;
                    doubled_slice_x(b, x, gram);
                    if (determinant_is_zero_i64(gram, n)) return;
                    const i64 ymax = std::min(yhi, Rf / k);
                    if (ymax < ylo) return;
                    for_each_zero_box(
                        gram, n, ymax,
                        [&](std::span<const i64> y) {
                            if (sup_norm(y) < ylo) return;
                            doubled_slice_y(b, y, ygram);
                            if (!determinant_is_zero_i64(ygram, n)) ++cell.count;
                        },
                        budget);
                });
            }
            out.push_back(cell);
        }
    }
    return out;
}

CountRecord count_thin_set(const BiquadraticForm& b, double height_bound, std::span<const std::size_t> x_zero,
                           std::span<const std::size_t> y_zero, double budget) {
    const auto start = Clock::now();
    const std::size_t n = b.dim();
    const i64 Rf = HeightParams{n, height_bound}.pair_bound();
    auto free_coords = [&](std::span<const std::size_t> zero) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n; ++i)
            if (std::find(zero.begin(), zero.end(), i) == zero.end()) out.push_back(i);
        return out;
    };
    const auto xfree = free_coords(x_zero), yfree = free_coords(y_zero);
    // Walk the lower-dimensional side in the outer loop.
    const bool x_outer = xfree.size() <= yfree.size();
    const BiquadraticForm form = x_outer ? b : b.transposed();
    const auto& ofree = x_outer ? xfree : yfree;
    const auto& ifree = x_outer ? yfree : xfree;
    const std::size_t dout = ofree.size(), din = ifree.size();
    if (dout == 0 || din == 0) throw std::invalid_argument("count_thin_set: a side has no free coordinate");

    double work = 0;
    for (i64 k = 1; k <= Rf; ++k)
        work += (std::pow(2.0 * k + 1, dout) - std::pow(2.0 * k - 1, dout)) * std::pow(2.0 * (Rf / k) + 1, din);
    if (work > budget) throw BudgetExceeded("count_thin_set", work, budget);

    std::vector<i64> v(n, 0), gram(n * n), sub(din * din), wc(din);
    i64 count = 0;
    for_each_box(dout, Rf, [&](std::span<const i64> vc) {
        if (!canonical(vc) || !primitive(vc)) return;
        for (std::size_t i = 0; i < dout; ++i) v[ofree[i]] = vc[i];
        const i64 k = sup_norm(vc);
        doubled_slice_x(form, v, gram);
        bool zero_form = true;
        for (std::size_t i = 0; i < din; ++i)
            for (std::size_t j = 0; j < din; ++j) {
                sub[i * din + j] = gram[ifree[i] * n + ifree[j]];
                zero_form = zero_form && sub[i * din + j] == 0;
            }
        const i64 L = Rf / k;
        // Canonical inner vectors: the first nonzero coordinate is positive.
        std::fill(wc.begin(), wc.end(), -L);
        wc[0] = 0;
        while (true) {
            if (canonical(wc) && primitive(wc)) {
                bool zero = zero_form;
                if (!zero) {
                    i128 f = 0;
                    for (std::size_t i = 0; i < din; ++i) {
                        i128 row = 0;
                        for (std::size_t j = 0; j < din; ++j) row += static_cast<i128>(sub[i * din + j]) * wc[j];
                        f += row * wc[i];
                    }
                    zero = f == 0;
                }
                if (zero) ++count;
            }
            std::size_t j = 0;
            while (j < din && wc[j] == L) {
                wc[j] = j == 0 ? 0 : -L;
                ++j;
            }
            if (j == din) break;
            ++wc[j];
        }
    });
    return make_record("thin", {{"H", height_bound}, {"R", static_cast<double>(Rf)}}, count, start);
}

PeyrePrediction peyre_prediction(std::size_t n, const DensityEstimate& series, const IntegralEstimate& integral) {
    if (n < 4) throw std::domain_error("peyre_prediction: zeta(n-2) diverges for n = 3");
    PeyrePrediction p;
    p.zeta = riemann_zeta(static_cast<double>(n - 2));
    p.singular_series = series.value;
    p.series_uncertainty = series.tail_bound;
    p.singular_integral = integral.value;
    p.integral_stderr = integral.mc_stderr;
    const double scale = 1.0 / (4.0 * p.zeta * p.zeta);
    p.value = scale * series.value * integral.value;
    p.uncertainty = scale * std::hypot(series.value * integral.mc_stderr, integral.value * series.tail_bound);
    return p;
}

PeyrePrediction peyre_prediction(const BiquadraticForm& b, i64 q_max, const MonteCarloParams& mc, double budget) {
    if (b.dim() < 4) throw std::domain_error("peyre_prediction: zeta(n-2) diverges for n = 3");
    const auto series = joint_singular_series(b, q_max, budget);
    const auto integral = joint_singular_integral(b, mc);
    return peyre_prediction(b.dim(), series, integral);
}

}  // namespace bqc
