#pragma once

// Exact lattice-point counts on quadrics and on the biquadratic hypersurface
// F(x;y) = 0: N(w;B), N_x(Y), N(A;X,Y), N~(X,Y), M(R) and N_U(B).

#include "bqc/archimedean.hpp"
#include "bqc/arith.hpp"
#include "bqc/errors.hpp"
#include "bqc/forms.hpp"
#include "bqc/padic.hpp"
#include "bqc/quadric_count.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bqc {

struct CountRecord {
    std::string form_id;
    std::string method;
    std::vector<std::pair<std::string, double>> params;
    i64 count = 0;       // exact count; for weighted records the number of zeros visited
    double value = 0;    // weighted sum, equal to count for unweighted records
    bool weighted = false;
    double seconds = 0;

    double param(const std::string& key) const;
};

// Anticanonical height |x|^{n-2} |y|^{n-2} <= bound, i.e. |x||y| <= bound^{1/(n-2)}.
struct HeightParams {
    std::size_t n = 3;
    double bound = 1;

    int exponent() const { return static_cast<int>(n) - 2; }
    // Largest integer R with R^{n-2} <= bound; the pair constraint is |x||y| <= R.
    i64 pair_bound() const;
};

CountRecord count_quadric_box(const QuadraticForm& f, i64 B, CountMethod method = CountMethod::slice,
                              double budget = kDefaultBudget);

// Sum of w(x/B) over integer zeros of F.
CountRecord count_quadric_weighted(const QuadraticForm& f, const WeightFunction& w, double B,
                                   double budget = kDefaultBudget);

// #{y : |y| <= Y, F_x(y) = 0}.
CountRecord count_Nx(const BiquadraticForm& b, std::span<const i64> x, i64 Y, double budget = kDefaultBudget);

// #{(x, y) : |x| <= X, |y| <= Y, x in A_1, y in A_2, F(x;y) = 0}.
CountRecord count_A(const BiquadraticForm& b, i64 X, i64 Y, double budget = kDefaultBudget);

// sum over |x| <= X, x in A_1, of N_x(Y).
CountRecord count_tilde(const BiquadraticForm& b, i64 X, i64 Y, double budget = kDefaultBudget);

enum class NURoute { direct, mobius };

const char* to_string(NURoute route);

// Points of U = X \ Z of height <= height_bound: primitive pairs up to the
// four sign changes (x, y) -> (+-x, +-y).
CountRecord count_NU(const BiquadraticForm& b, double height_bound, NURoute route, double budget = kDefaultBudget);

// Primitive pairs off Z of height <= height_bound without quotienting by signs.
CountRecord count_NU_signed(const BiquadraticForm& b, double height_bound, double budget = kDefaultBudget);

// #{(x, y) in A : |x||y| <= R, F(x;y) = 0}.
CountRecord mobius_M(const BiquadraticForm& b, double R, double budget = kDefaultBudget);

// Cell (i, j) holds the pairs counted by M(R) with |x| in (X_{i-1}, X_i] and
// |y| in (X_{j-1}, X_j], X_i = (1+xi)^i, cell 0 being (0, 1].
struct DyadicCell {
    int i = 0, j = 0;
    i64 count = 0;
};

// Counts every cell by its own enumeration.
std::vector<DyadicCell> dyadic_cells(const BiquadraticForm& b, double R, double xi, double budget = kDefaultBudget);

// Primitive pairs up to signs with x_i = 0 for i in x_zero and y_j = 0 for
// j in y_zero, F(x;y) = 0, height <= height_bound (no restriction to U).
CountRecord count_thin_set(const BiquadraticForm& b, double height_bound, std::span<const std::size_t> x_zero,
                           std::span<const std::size_t> y_zero, double budget = kDefaultBudget);

struct PeyrePrediction {
    double value = 0;
    double uncertainty = 0;
    double singular_series = 0;
    double series_uncertainty = 0;
    double singular_integral = 0;
    double integral_stderr = 0;
    double zeta = 0;  // zeta(n-2)
};

// c = S T / (4 zeta(n-2)^2). zeta(1) diverges, so n = 3 throws std::domain_error.
PeyrePrediction peyre_prediction(std::size_t n, const DensityEstimate& series, const IntegralEstimate& integral);
PeyrePrediction peyre_prediction(const BiquadraticForm& b, i64 q_max, const MonteCarloParams& mc,
                                 double budget = kDefaultBudget);

}  // namespace bqc
