#include "bqc/forms.hpp"

#include "bqc/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bqc {

namespace {

constexpr i64 kSmallLimit = i64{1} << 62;

bool fits_small(const Integer& v) { return v < kSmallLimit && v > -kSmallLimit; }

}  // namespace

QuadraticForm::QuadraticForm(IntMatrix gram) : gram_(std::move(gram)) {
    const std::size_t n = gram_.size();
    if (n < 2) throw std::invalid_argument("QuadraticForm: dimension must be at least 2");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (gram_(i, j) != gram_(j, i))
                throw std::invalid_argument("QuadraticForm: gram not symmetric at (" + std::to_string(i + 1) +
                                            "," + std::to_string(j + 1) + ")");
    disc_ = bareiss_determinant(gram_);
    small_ok_ = true;
    small_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!fits_small(gram_(i, j))) {
                small_ok_ = false;
                break;
            }
            small_[i * n + j] = static_cast<i64>(gram_(i, j));
        }
}

QuadraticForm QuadraticForm::diagonal(std::span<const i64> diag) {
    IntMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return QuadraticForm(std::move(m));
}

QuadraticForm QuadraticForm::from_rows(const std::vector<std::vector<i64>>& rows) {
    IntMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::invalid_argument("QuadraticForm: gram is not square");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return QuadraticForm(std::move(m));
}

Integer QuadraticForm::height() const {
    Integer h = 0;
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j) h = std::max(h, Integer(abs(gram_(i, j))));
    return h;
}

Integer QuadraticForm::evaluate(std::span<const i64> x) const {
    if (x.size() != dim()) throw std::invalid_argument("QuadraticForm::evaluate: length mismatch");
    Integer s = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (x[i] == 0) continue;
        Integer row = 0;
        for (std::size_t j = 0; j < dim(); ++j) row += gram_(i, j) * x[j];
        s += row * x[i];
    }
    return s;
}

double QuadraticForm::evaluate(std::span<const double> x) const {
    const auto& g = gram_i64();
    const std::size_t n = dim();
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < n; ++j) row += static_cast<double>(g[i * n + j]) * x[j];
        s += row * x[i];
    }
    return s;
}

const std::vector<i64>& QuadraticForm::gram_i64() const {
    if (!small_ok_) throw std::overflow_error("QuadraticForm: gram entries exceed machine range");
    return small_;
}

QuadraticForm QuadraticForm::permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != dim()) throw std::invalid_argument("QuadraticForm::permuted: length mismatch");
    IntMatrix m(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j) m(i, j) = gram_(perm[i], perm[j]);
    return QuadraticForm(std::move(m));
}

Integer discriminant(const QuadraticForm& f) { return f.discriminant(); }
Integer height(const QuadraticForm& f) { return f.height(); }

Integer DualForm::evaluate(std::span<const i64> c) const {
    const std::size_t n = mstar.size();
    if (c.size() != n) throw std::invalid_argument("DualForm::evaluate: length mismatch");
    Integer s = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += mstar(i, j) * c[i] * c[j];
    return s;
}

DualForm dual_form(const QuadraticForm& f) {
    if (!f.is_nonsingular()) throw SingularForm("dual_form: discriminant is zero");
    return DualForm{f, adjugate(f.gram())};
}

IntMatrix SliceForm::doubled() const {
    IntMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rational v = gram(i, j) * 2;
            d(i, j) = numerator(v);
        }
    return d;
}

Rational SliceForm::evaluate(std::span<const i64> y) const {
    Rational s = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += gram(i, j) * y[i] * y[j];
    return s;
}

BiquadraticForm::BiquadraticForm(std::size_t n) : n_(n) {
    if (n < 2) throw std::invalid_argument("BiquadraticForm: dimension must be at least 2");
}

void BiquadraticForm::add_term(int i, int j, int k, int l, const Integer& c) {
    const int n = static_cast<int>(n_);
    for (int idx : {i, j, k, l})
        if (idx < 0 || idx >= n) throw std::out_of_range("BiquadraticForm::add_term: index out of range");
    if (i > j) std::swap(i, j);
    if (k > l) std::swap(k, l);
    BiIndex key{i, j, k, l};
    Integer& slot = coeffs_[key];
    slot += c;
    if (slot == 0) coeffs_.erase(key);
    rebuild_terms();
}

BiquadraticForm BiquadraticForm::diagonal(std::span<const i64> coeffs) {
    BiquadraticForm b(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const int k = static_cast<int>(i);
        b.add_term(k, k, k, k, coeffs[i]);
    }
    return b;
}

void BiquadraticForm::rebuild_terms() {
    terms_.clear();
    for (const auto& [idx, c] : coeffs_) {
        if (!fits_small(c)) throw std::overflow_error("BiquadraticForm: coefficient exceeds machine range");
        terms_.push_back({idx[0], idx[1], idx[2], idx[3], static_cast<i64>(c)});
    }
}

Integer BiquadraticForm::evaluate(std::span<const i64> x, std::span<const i64> y) const {
    if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("BiquadraticForm::evaluate: length mismatch");
    Integer s = 0;
    for (const auto& [idx, c] : coeffs_) s += c * x[idx[0]] * x[idx[1]] * y[idx[2]] * y[idx[3]];
    return s;
}

double BiquadraticForm::evaluate(std::span<const double> x, std::span<const double> y) const {
    double s = 0;
    for (const auto& t : terms_) s += static_cast<double>(t.c) * (x[t.i] * x[t.j]) * (y[t.k] * y[t.l]);
    return s;
}

BiquadraticForm BiquadraticForm::transposed() const {
    BiquadraticForm t(n_);
    for (const auto& [idx, c] : coeffs_) t.coeffs_[{idx[2], idx[3], idx[0], idx[1]}] = c;
    t.rebuild_terms();
    return t;
}

namespace {

// Coefficient a_{kl}(v) of w_k w_l in the slice where v is the fixed block.
SliceForm make_slice(const BiquadraticForm& b, std::span<const i64> v, bool fix_x) {
    const std::size_t n = b.dim();
    if (v.size() != n) throw std::invalid_argument("slice: vector length mismatch");
    std::vector<Integer> a(n * n, 0);
    for (const auto& [idx, c] : b.coeffs()) {
        const int fi = fix_x ? idx[0] : idx[2], fj = fix_x ? idx[1] : idx[3];
        const int vk = fix_x ? idx[2] : idx[0], vl = fix_x ? idx[3] : idx[1];
        a[vk * n + vl] += c * v[fi] * v[fj];
    }
    SliceForm s{n, RatMatrix(n), 0};
    IntMatrix doubled(n);
    for (std::size_t k = 0; k < n; ++k) {
        s.gram(k, k) = Rational(a[k * n + k]);
        doubled(k, k) = 2 * a[k * n + k];
        for (std::size_t l = k + 1; l < n; ++l) {
            Rational half(a[k * n + l], 2);
            s.gram(k, l) = half;
            s.gram(l, k) = half;
            doubled(k, l) = a[k * n + l];
            doubled(l, k) = a[k * n + l];
        }
    }
    Integer two_n = Integer(1) << n;
    s.det = Rational(bareiss_determinant(doubled), two_n);
    return s;
}

void doubled_slice(const BiquadraticForm& b, std::span<const i64> v, std::span<i64> out, bool fix_x) {
    const std::size_t n = b.dim();
    if (v.size() != n || out.size() != n * n) throw std::invalid_argument("doubled_slice: size mismatch");
    std::fill(out.begin(), out.end(), 0);
    for (const auto& t : b.terms()) {
        const int fi = fix_x ? t.i : t.k, fj = fix_x ? t.j : t.l;
        const int vk = fix_x ? t.k : t.i, vl = fix_x ? t.l : t.j;
        i64 prod;
        if (__builtin_mul_overflow(t.c, v[fi], &prod) || __builtin_mul_overflow(prod, v[fj], &prod))
            throw std::overflow_error("doubled_slice: overflow");
        if (vk == vl) {
            if (__builtin_mul_overflow(prod, i64{2}, &prod)) throw std::overflow_error("doubled_slice: overflow");
            out[vk * n + vk] += prod;
        } else {
            out[vk * n + vl] += prod;
            out[vl * n + vk] += prod;
        }
    }
}

}  // namespace

SliceForm slice_x(const BiquadraticForm& b, std::span<const i64> x) { return make_slice(b, x, true); }
SliceForm slice_y(const BiquadraticForm& b, std::span<const i64> y) { return make_slice(b, y, false); }

void doubled_slice_x(const BiquadraticForm& b, std::span<const i64> x, std::span<i64> out) {
    doubled_slice(b, x, out, true);
}
void doubled_slice_y(const BiquadraticForm& b, std::span<const i64> y, std::span<i64> out) {
    doubled_slice(b, y, out, false);
}

Integer determinant_i64(std::span<const i64> a, std::size_t n) {
    double log2_bound = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < n; ++j) row += static_cast<double>(a[i * n + j]) * static_cast<double>(a[i * n + j]);
        if (row == 0) return 0;
        log2_bound += 0.5 * std::log2(row);
    }
    if (log2_bound < 60) {
        SquareMatrix<i128> m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
        const i128 d = bareiss_determinant(std::move(m));
        // i128 -> Integer via two 64-bit halves.
        const bool neg = d < 0;
        const unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-d) : static_cast<unsigned __int128>(d);
        Integer r = Integer(static_cast<u64>(mag >> 64));
        r <<= 64;
        r += static_cast<u64>(mag);
        return neg ? Integer(-r) : r;
    }
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
    return bareiss_determinant(std::move(m));
}

bool determinant_is_zero_i64(std::span<const i64> a, std::size_t n) { return determinant_i64(a, n) == 0; }

bool in_Z(const BiquadraticForm& b, std::span<const i64> x, std::span<const i64> y) {
    if (b.evaluate(x, y) != 0) throw NotOnHypersurface("in_Z: F(x;y) != 0");
    return slice_x(b, x).det == 0 || slice_y(b, y).det == 0;
}

}  // namespace bqc
