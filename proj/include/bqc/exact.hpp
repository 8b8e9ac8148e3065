#pragma once

// Exact integer / rational scalars and a small dense square matrix used by
// the forms module. Determinants are fraction-free (Bareiss).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bqc {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, const T& fill = T(0)) : n_(n), data_(n * n, fill) {}
    SquareMatrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()) {
        data_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) throw std::invalid_argument("SquareMatrix: ragged initializer");
            for (const auto& v : row) data_.push_back(v);
        }
    }

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    bool is_symmetric() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("SquareMatrix: size mismatch");
        SquareMatrix c(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i)
            for (std::size_t k = 0; k < a.n_; ++k) {
                if (a(i, k) == 0) continue;
                for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    SquareMatrix scaled(const T& s) const {
        SquareMatrix c = *this;
        for (auto& v : c.data_) v *= s;
        return c;
    }

    // Matrix with row `r` and column `c` removed.
    SquareMatrix minor_matrix(std::size_t r, std::size_t c) const {
        SquareMatrix m(n_ - 1);
        for (std::size_t i = 0, mi = 0; i < n_; ++i) {
            if (i == r) continue;
            for (std::size_t j = 0, mj = 0; j < n_; ++j) {
                if (j == c) continue;
                m(mi, mj++) = (*this)(i, j);
            }
            ++mi;
        }
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

using IntMatrix = SquareMatrix<Integer>;
using RatMatrix = SquareMatrix<Rational>;

// Fraction-free Gaussian elimination. T must support exact division of the
// Bareiss intermediate products (cpp_int, __int128, int64_t when bounded).
template <class T>
T bareiss_determinant(SquareMatrix<T> a) {
    const std::size_t n = a.size();
    if (n == 0) return T(1);
    T sign(1);
    T prev(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && a(swap_row, k) == 0) ++swap_row;
            if (swap_row == n) return T(0);
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap_row, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) = (a(k, k) * a(i, j) - a(i, k) * a(k, j)) / prev;
            }
            a(i, k) = T(0);
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

// Classical adjugate: transpose of the cofactor matrix, so adj(M)·M = det(M)·I.
inline IntMatrix adjugate(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 1) return IntMatrix::identity(1);
    IntMatrix adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Integer cof = bareiss_determinant(m.minor_matrix(i, j));
            if ((i + j) % 2) cof = -cof;
            adj(j, i) = cof;
        }
    return adj;
}

inline std::string to_string(const Integer& v) { return v.str(); }
inline std::string to_string(const Rational& v) { return v.str(); }

}  // namespace bqc
