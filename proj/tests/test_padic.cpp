#include <doctest.h>

#include "bqc/arith.hpp"
#include "bqc/errors.hpp"
#include "bqc/expsums.hpp"
#include "bqc/padic.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace bqc;

namespace {

const oracle::Matrix kQuinary = {{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, -1}};

i64 pow_i(i64 p, int e) {
    i64 r = 1;
    while (e-- > 0) r *= p;
    return r;
}

}  // namespace

TEST_CASE("count_mod examples") {
    const auto f = QuadraticForm::from_rows({{1, 0}, {0, 1}});
    CHECK(count_mod(f, 3, 1).count == 1);
    CHECK(count_mod(f, 5, 1).count == 9);
    CHECK(count_mod(f, 7, 0).count == 1);
    CHECK(count_mod(QuadraticForm::from_rows(kQuinary), 11, 0).count == 1);
}

TEST_CASE("count_mod matches enumeration") {
    const auto q5 = QuadraticForm::from_rows(kQuinary);
    for (int r = 1; r <= 3; ++r) CHECK(count_mod(q5, 3, r).count == oracle::count_mod(kQuinary, pow_i(3, r)));
    for (int t = 0; t < 8; ++t) {
        const auto m = oracle::random_symmetric(3, 4);
        const auto f = QuadraticForm::from_rows(m);
        for (i64 p : {2, 3, 5})
            for (int r = 1; r <= 3; ++r) {
                const auto c = count_mod(f, p, r).count;
                CHECK(c == oracle::count_mod(m, pow_i(p, r)));
                CHECK(c >= 1);
                CHECK(c <= Integer(pow_i(p, 3 * r)));
            }
    }
}

TEST_CASE("good-prime recursion holds by enumeration") {
    for (std::size_t n : {3, 4, 5}) {
        int done = 0;
        while (done < 2) {
            const auto m = oracle::random_symmetric(n, 2);
            const auto f = QuadraticForm::from_rows(m);
            if (!f.is_nonsingular()) continue;
            for (i64 p : {3, 5, 7}) {
                if (f.discriminant() % p == 0) continue;
                std::vector<i64> N = {1};
                for (int r = 1; r <= 3; ++r) {
                    const double work = std::pow(static_cast<double>(p), static_cast<double>(r * n));
                    N.push_back(work <= 5e7 ? oracle::count_mod(m, pow_i(p, r)) : static_cast<i64>(count_mod(f, p, r).count));
                }
                for (int r = 2; r <= 3; ++r) {
                    const i64 rhs = pow_i(p, (r - 1) * static_cast<int>(n - 1)) * (N[1] - 1) + pow_i(p, n) * N[r - 2];
                    CHECK(N[r] == rhs);
                }
            }
            ++done;
        }
    }
}

TEST_CASE("local density at p = 3 for the quinary form") {
    const auto f = QuadraticForm::from_rows(kQuinary);
    const auto d = local_density(f, 3);
    const double n1 = static_cast<double>(oracle::count_mod(kQuinary, 3));
    CHECK(d.value == doctest::Approx((n1 - 1) / 81.0 / (1 - 1 / 27.0)).epsilon(1e-12));
    // Normalized counts approach sigma_p and the gap shrinks by p^{n-2} every two levels.
    std::vector<double> D;
    for (int r = 1; r <= 4; ++r)
        D.push_back(static_cast<double>(count_mod(f, 3, r).count) / std::pow(3.0, 4.0 * r));
    for (int r = 0; r < 3; ++r)
        CHECK(D[r] == doctest::Approx(static_cast<double>(oracle::count_mod(kQuinary, pow_i(3, r + 1))) / std::pow(3.0, 4.0 * (r + 1))).epsilon(1e-12));
    for (int r = 0; r + 2 < 4; ++r) CHECK(std::abs(D[r + 2] - d.value) <= std::abs(D[r] - d.value) / 27.0 + 1e-15);
}

TEST_CASE("sigma_p formula at good primes for odd n") {
    int done = 0;
    while (done < 6) {
        const auto m = oracle::random_symmetric(3, 3);
        const auto f = QuadraticForm::from_rows(m);
        if (!f.is_nonsingular()) continue;
        for (i64 p : {3, 5, 7, 11}) {
            if (f.discriminant() % p == 0) continue;
            const double n1 = static_cast<double>(oracle::count_mod(m, p));
            const double formula = (n1 - 1) / (p * p) / (1 - 1.0 / p);
            CHECK(local_density(f, p).value == doctest::Approx(formula).epsilon(1e-12));
            ++done;
        }
    }
}

TEST_CASE("local densities are nonnegative, including anisotropic cases") {
    const auto f = QuadraticForm::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 3}});
    for (i64 p : {2, 3, 5}) CHECK(local_density(f, p).value >= 0);
    const auto g = QuadraticForm::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(local_density(g, 2).value >= 0);
}

TEST_CASE("singular series routes agree") {
    const auto f = QuadraticForm::from_rows(kQuinary);
    const auto s = singular_series(f, 40, 40);
    const double qv = s.param("q_series_value"), qt = s.param("q_series_tail");
    CHECK(s.value > 0);
    CHECK(std::abs(s.value - qv) <= s.tail_bound + qt);
    CHECK(s.tail_bound >= 0);
    const auto q = singular_series_qsum(f, 40);
    CHECK(q.value == doctest::Approx(qv).epsilon(1e-12));
    // Independent q-series: sum q^{-n} S_q(0) from the direct double loop for small q.
    double partial = 0;
    const std::vector<i64> zero(5, 0);
    for (i64 qq = 1; qq <= 6; ++qq) partial += oracle::expsum(kQuinary, qq, zero).real() / std::pow(static_cast<double>(qq), 5.0);
    CHECK(singular_series_qsum(f, 6).value == doctest::Approx(partial).epsilon(1e-9));
}

TEST_CASE("singular series is invariant under relabeling") {
    const auto f = QuadraticForm::from_rows({{1, 1, 0, 0, 0}, {1, 2, 0, 0, 0}, {0, 0, -1, 1, 0}, {0, 0, 1, 2, 0}, {0, 0, 0, 0, -3}});
    const std::vector<std::size_t> perm = {4, 2, 0, 3, 1};
    const auto g = f.permuted(perm);
    CHECK(singular_series_euler(f, 30).value == singular_series_euler(g, 30).value);
    CHECK_THROWS_AS(singular_series(QuadraticForm::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, -1}}), 10, 10), std::domain_error);
}

TEST_CASE("joint singular series") {
    const std::vector<i64> signs = {1, 1, -1};
    const auto b = BiquadraticForm::diagonal(signs);
    CHECK(joint_singular_series(b, 1).value == doctest::Approx(1.0).epsilon(1e-15));
    double oracle_sum = 0;
    for (i64 q = 1; q <= 5; ++q) {
        const auto t = oracle::joint_term(b, q);
        CHECK(std::abs(t.imag()) < 1e-6);
        CHECK(static_cast<double>(joint_series_term(b, q)) == doctest::Approx(t.real()).epsilon(1e-9));
        const double scaled = t.real() / std::pow(static_cast<double>(q), 6.0);
        CHECK(std::abs(scaled) <= static_cast<double>(euler_phi(q)) + 1e-12);
        oracle_sum += scaled;
    }
    CHECK(joint_singular_series(b, 5).value == doctest::Approx(oracle_sum).epsilon(1e-9));
}
