#include <doctest.h>

#include "bqc/errors.hpp"
#include "bqc/forms.hpp"
#include "oracles.hpp"

using namespace bqc;

namespace {

QuadraticForm diag(std::vector<i64> d) { return QuadraticForm::diagonal(d); }

oracle::Matrix rows_of(const QuadraticForm& f) {
    oracle::Matrix m(f.dim(), std::vector<i64>(f.dim()));
    for (std::size_t i = 0; i < f.dim(); ++i)
        for (std::size_t j = 0; j < f.dim(); ++j) m[i][j] = static_cast<i64>(f.gram()(i, j));
    return m;
}

QuadraticForm random_nonsingular(std::size_t n, i64 bound) {
    while (true) {
        auto f = QuadraticForm::from_rows(oracle::random_symmetric(n, bound));
        if (f.is_nonsingular()) return f;
    }
}

BiquadraticForm random_biquadratic(std::size_t n, i64 bound) {
    BiquadraticForm b(n);
    for (int i = 0; i < static_cast<int>(n); ++i)
        for (int j = i; j < static_cast<int>(n); ++j)
            for (int k = 0; k < static_cast<int>(n); ++k)
                for (int l = k; l < static_cast<int>(n); ++l) b.add_term(i, j, k, l, oracle::uniform_int(-bound, bound));
    return b;
}

}  // namespace

TEST_CASE("discriminant examples") {
    CHECK(discriminant(diag({1, 1, 1, 1, 1})) == 1);
    CHECK(discriminant(diag({1, 1, 1, 1, -1})) == -1);
    for (int t = 0; t < 20; ++t) {
        const auto m = oracle::random_symmetric(5, 3);
        CHECK(discriminant(QuadraticForm::from_rows(m)) == oracle::cofactor_det(m));
    }
}

TEST_CASE("discriminant bounded by n! height^n") {
    for (int t = 0; t < 20; ++t) {
        const auto f = QuadraticForm::from_rows(oracle::random_symmetric(4, 5));
        if (f.height() == 0) continue;
        CHECK(f.height() >= 1);
        Integer bound = 24;
        for (int i = 0; i < 4; ++i) bound *= f.height();
        CHECK(abs(f.discriminant()) <= bound);
    }
}

TEST_CASE("height examples") {
    CHECK(height(diag({1, 1, 1})) == 1);
    CHECK(height(diag({1, 1, 1, 1, 1, 1, 1})) == 1);
    CHECK(height(diag({1, 2, 3, 4, -5})) == 5);
    CHECK(height(QuadraticForm::from_rows({{0, 7, 0}, {7, 0, 0}, {0, 0, 0}})) == 7);
}

TEST_CASE("dual form examples") {
    CHECK(dual_form(diag({1, 1, 1, 1})).mstar == IntMatrix::identity(4));
    const auto d = dual_form(diag({1, 2, 3, 4, 5}));
    const IntMatrix expected = {{120, 0, 0, 0, 0}, {0, 60, 0, 0, 0}, {0, 0, 40, 0, 0}, {0, 0, 0, 30, 0}, {0, 0, 0, 0, 24}};
    CHECK(d.mstar == expected);
    CHECK_THROWS_AS(dual_form(QuadraticForm::from_rows({{1, 1}, {1, 1}})), SingularForm);
}

TEST_CASE("dual identity and double adjugate") {
    for (std::size_t n : {3, 4, 5}) {
        for (int t = 0; t < 10; ++t) {
            const auto f = random_nonsingular(n, 3);
            const auto d = dual_form(f);
            CHECK(d.mstar * f.gram() == IntMatrix::identity(n).scaled(f.discriminant()));
            Integer p = 1;
            for (std::size_t k = 0; k + 2 < n; ++k) p *= f.discriminant();
            CHECK(adjugate(d.mstar) == f.gram().scaled(p));
        }
    }
}

TEST_CASE("dual form evaluates c^T adj(M) c") {
    const auto f = random_nonsingular(4, 3);
    const auto d = dual_form(f);
    const std::vector<i64> c = {1, -2, 0, 3};
    Integer expect = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) expect += d.mstar(i, j) * c[i] * c[j];
    CHECK(d.evaluate(c) == expect);
}

TEST_CASE("slice examples") {
    const std::vector<i64> ones = {1, 1, 1};
    const auto b = BiquadraticForm::diagonal(ones);
    const std::vector<i64> x = {1, 2, 3};
    const auto s = slice_x(b, x);
    CHECK(s.det == 36);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(s.gram(i, j) == (i == j ? Rational(x[i] * x[i]) : Rational(0)));

    const auto r = random_biquadratic(3, 3);
    const std::vector<i64> zero = {0, 0, 0};
    const auto z = slice_x(r, zero);
    CHECK(z.det == 0);
    CHECK(z.gram == RatMatrix(3));
}

TEST_CASE("slices evaluate to F(x;y)") {
    for (int t = 0; t < 10; ++t) {
        const auto b = random_biquadratic(3, 4);
        const auto x = oracle::random_vector(3, 5);
        const auto sx = slice_x(b, x);
        for (int k = 0; k < 20; ++k) {
            const auto y = oracle::random_vector(3, 5);
            const Integer f = oracle::biquad_value(b, x, y);
            CHECK(b.evaluate(x, y) == f);
            CHECK(sx.evaluate(y) == Rational(f));
            CHECK(slice_y(b, y).evaluate(x) == Rational(f));
        }
        // 2G is the directly built doubled Gram; detG = det(2G) / 2^n.
        const auto g2 = oracle::doubled_slice(b, x, true);
        CHECK(sx.doubled() == QuadraticForm::from_rows(g2).gram());
        CHECK(sx.det * 8 == Rational(oracle::cofactor_det(g2)));
        CHECK((sx.det == 0) == (oracle::cofactor_det(g2) == 0));
    }
}

TEST_CASE("slice determinant is bihomogeneous") {
    for (int t = 0; t < 10; ++t) {
        const auto b = random_biquadratic(3, 3);
        const auto x = oracle::random_vector(3, 4);
        const Rational base = slice_x(b, x).det;
        for (i64 lambda : {-2, 2, 3}) {
            std::vector<i64> lx = x;
            for (auto& v : lx) v *= lambda;
            Rational factor = 1;
            for (int k = 0; k < 6; ++k) factor *= lambda;
            CHECK(slice_x(b, lx).det == factor * base);
        }
    }
}

TEST_CASE("machine-integer slice and determinant paths") {
    for (int t = 0; t < 20; ++t) {
        const auto b = random_biquadratic(4, 5);
        const auto x = oracle::random_vector(4, 9);
        std::vector<i64> out(16);
        doubled_slice_x(b, x, out);
        const auto g2 = oracle::doubled_slice(b, x, true);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(out[i * 4 + j] == g2[i][j]);
        CHECK(determinant_i64(out, 4) == oracle::cofactor_det(g2));
        doubled_slice_y(b, x, out);
        const auto h2 = oracle::doubled_slice(b, x, false);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(out[i * 4 + j] == h2[i][j]);
    }
}

TEST_CASE("in_Z examples") {
    const std::vector<i64> ones = {1, 1, 1};
    const auto b = BiquadraticForm::diagonal(ones);
    const std::vector<i64> x0 = {0, 1, 1}, y0 = {1, 0, 0};
    CHECK(in_Z(b, x0, y0));

    const std::vector<i64> signs = {1, 1, -1};
    const auto c = BiquadraticForm::diagonal(signs);
    const std::vector<i64> x1 = {1, 1, 1}, y1 = {3, 4, 5};
    CHECK_FALSE(in_Z(c, x1, y1));

    const std::vector<i64> y2 = {1, 1, 1};
    CHECK_THROWS_AS(in_Z(c, x1, y2), NotOnHypersurface);
}

TEST_CASE("transpose swaps the roles of x and y") {
    const auto b = random_biquadratic(3, 3);
    const auto t = b.transposed();
    for (int k = 0; k < 20; ++k) {
        const auto x = oracle::random_vector(3, 4), y = oracle::random_vector(3, 4);
        CHECK(t.evaluate(x, y) == b.evaluate(y, x));
    }
    CHECK(t.transposed() == b);
}

TEST_CASE("constructor rejects bad input") {
    CHECK_THROWS_AS(QuadraticForm::from_rows({{1, 2}, {3, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(QuadraticForm::from_rows({{1}}), std::invalid_argument);
}

TEST_CASE("permuted relabels variables") {
    const auto f = QuadraticForm::from_rows({{1, 2, 0}, {2, 3, 1}, {0, 1, -4}});
    const std::vector<std::size_t> perm = {2, 0, 1};
    const auto g = f.permuted(perm);
    CHECK(g.discriminant() == f.discriminant());
    const std::vector<i64> x = {5, -1, 2};
    std::vector<i64> old(3);
    for (std::size_t i = 0; i < 3; ++i) old[perm[i]] = x[i];
    CHECK(g.evaluate(x) == f.evaluate(old));
    CHECK(rows_of(g)[0][0] == -4);
}
