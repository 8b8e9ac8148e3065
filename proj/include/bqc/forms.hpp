#pragma once

// Integral quadratic forms F(x) = x^T M x, their duals, and biquadratic forms
// F(x;y) of bidegree (2,2) with their Gram slices F_x and F_y.

#include "bqc/arith.hpp"
#include "bqc/exact.hpp"

#include <array>
#include <map>
#include <span>
#include <vector>

namespace bqc {

class QuadraticForm {
public:
    // Throws std::invalid_argument unless gram is symmetric with n >= 2.
    explicit QuadraticForm(IntMatrix gram);

    static QuadraticForm diagonal(std::span<const i64> diag);
    static QuadraticForm from_rows(const std::vector<std::vector<i64>>& rows);

    std::size_t dim() const { return gram_.size(); }
    const IntMatrix& gram() const { return gram_; }

    const Integer& discriminant() const { return disc_; }
    Integer height() const;
    bool is_nonsingular() const { return disc_ != 0; }

    Integer evaluate(std::span<const i64> x) const;
    double evaluate(std::span<const double> x) const;

    // Gram entries as machine integers; throws std::overflow_error if any
    // entry exceeds 2^62 in magnitude.
    const std::vector<i64>& gram_i64() const;

    // Form obtained by relabeling variables: new x_i is old x_{perm[i]}.
    QuadraticForm permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) { return a.gram_ == b.gram_; }

private:
    IntMatrix gram_;
    Integer disc_;
    std::vector<i64> small_;
    bool small_ok_ = false;
};

Integer discriminant(const QuadraticForm& f);
Integer height(const QuadraticForm& f);

// F* with matrix adj(M) = Delta_F M^{-1}.
struct DualForm {
    QuadraticForm base;
    IntMatrix mstar;

    Integer evaluate(std::span<const i64> c) const;
};

// Throws SingularForm when Delta_F = 0.
DualForm dual_form(const QuadraticForm& f);

// Gram matrix of a slice F_x (or F_y): exact rationals with denominator | 2.
struct SliceForm {
    std::size_t n = 0;
    RatMatrix gram;
    Rational det;

    // 2G, an integral symmetric matrix; y^T (2G) y = 2 F_x(y).
    IntMatrix doubled() const;
    Rational evaluate(std::span<const i64> y) const;
};

// Index quadruple (i, j, k, l) with i <= j, k <= l (0-based) for the monomial
// x_i x_j y_k y_l.
using BiIndex = std::array<int, 4>;

class BiquadraticForm {
public:
    struct Term {
        int i, j, k, l;
        i64 c;
    };

    explicit BiquadraticForm(std::size_t n);

    // Adds c to the coefficient of x_i x_j y_k y_l (indices normalized so
    // that i <= j, k <= l). Zero coefficients are dropped.
    void add_term(int i, int j, int k, int l, const Integer& c);

    // sum_i signs[i] * x_i^2 y_i^2
    static BiquadraticForm diagonal(std::span<const i64> coeffs);

    std::size_t dim() const { return n_; }
    const std::map<BiIndex, Integer>& coeffs() const { return coeffs_; }
    const std::vector<Term>& terms() const { return terms_; }

    Integer evaluate(std::span<const i64> x, std::span<const i64> y) const;
    double evaluate(std::span<const double> x, std::span<const double> y) const;

    // Swaps the roles of x and y.
    BiquadraticForm transposed() const;

    friend bool operator==(const BiquadraticForm& a, const BiquadraticForm& b) {
        return a.n_ == b.n_ && a.coeffs_ == b.coeffs_;
    }

private:
    void rebuild_terms();

    std::size_t n_;
    std::map<BiIndex, Integer> coeffs_;
    std::vector<Term> terms_;
};

SliceForm slice_x(const BiquadraticForm& b, std::span<const i64> x);
SliceForm slice_y(const BiquadraticForm& b, std::span<const i64> y);

// Doubled slice Gram 2G of F_x as a machine-integer row-major n*n array.
// Used by the enumeration paths; throws std::overflow_error on overflow.
void doubled_slice_x(const BiquadraticForm& b, std::span<const i64> x, std::span<i64> out);
void doubled_slice_y(const BiquadraticForm& b, std::span<const i64> y, std::span<i64> out);

// Exact determinant of a row-major machine-integer matrix. Uses 128-bit
// Bareiss elimination when the Hadamard bound allows, else arbitrary precision.
Integer determinant_i64(std::span<const i64> a, std::size_t n);
bool determinant_is_zero_i64(std::span<const i64> a, std::size_t n);

// Whether (x, y) lies in the degenerate locus det(F_x) det(F_y) = 0.
// Throws NotOnHypersurface when F(x;y) != 0.
bool in_Z(const BiquadraticForm& b, std::span<const i64> x, std::span<const i64> y);

}  // namespace bqc
