#pragma once

// Local solution counts #{x mod p^r : F(x) = 0 mod p^r}, local densities
// sigma_p, the singular series of a quadratic form (Euler product and
// q-series routes) and the partial sums of the joint singular series of a
// biquadratic form.

#include "bqc/arith.hpp"
#include "bqc/errors.hpp"
#include "bqc/exact.hpp"
#include "bqc/forms.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bqc {

struct LocalCount {
    i64 p = 0;
    int r = 0;
    Integer count;
};

enum class DensityRoute { euler_product, q_series, brute_mod };

std::string to_string(DensityRoute route);

struct DensityEstimate {
    double value = 0;
    double tail_bound = 0;
    DensityRoute route = DensityRoute::brute_mod;
    std::vector<std::pair<std::string, double>> params;

    double param(const std::string& key) const;
};

// Lifting descent. Nonzero classes mod p are lifted one level at a time
// until Hensel's lemma fixes the number of lifts; the class x = 0 mod p is
// reduced to N_{r-2} by scaling. Throws BudgetExceeded when the number of
// form evaluations would pass `budget`.
LocalCount count_mod(const QuadraticForm& f, i64 p, int r, double budget = kDefaultBudget);

// sigma_p = lim_r p^{-r(n-1)} N_r. Writing D_r for the normalized count and
// A_r for the part coming from x != 0 mod p, D_r = A_r + p^{-(n-2)} D_{r-2};
// A_r is constant once every branch is in the Hensel regime, which the
// descent detects exactly, so sigma_p = A / (1 - p^{-(n-2)}). Throws
// NotStabilized when that regime is not reached by r_max.
DensityEstimate local_density(const QuadraticForm& f, i64 p, int r_max = 6, double budget = kDefaultBudget);

// Euler product over p <= p_max with a tail bound for the omitted primes.
DensityEstimate singular_series_euler(const QuadraticForm& f, i64 p_max, double budget = kDefaultBudget);

// sum_{q <= q_max} q^{-n} S_q(0) with the envelope tail
// C |Delta|^{1/2} sum_{q > q_max} q^{-n/2+1+eps}, (C, eps) = (4, 0.25).
DensityEstimate singular_series_qsum(const QuadraticForm& f, i64 q_max, double budget = kDefaultBudget);

// Euler-product value; the q-series value and tail are attached as params
// "q_series_value" and "q_series_tail". Requires n >= 5.
DensityEstimate singular_series(const QuadraticForm& f, i64 q_max, i64 p_max, double budget = kDefaultBudget);

// Partial sum over q <= q_max of q^{-2n} sum_{(a,q)=1} sum_{x,y mod q} e(a F(x;y)/q).
// No tail bound is claimed: tail_bound holds |last term| as an indicator.
DensityEstimate joint_singular_series(const BiquadraticForm& b, i64 q_max, double budget = kDefaultBudget);

// Exact integer sum_{(a,q)=1} sum_{x,y mod q} e(a F(x;y)/q).
Integer joint_series_term(const BiquadraticForm& b, i64 q, double budget = kDefaultBudget);

inline constexpr double kEnvelopeC = 4.0;
inline constexpr double kEnvelopeEps = 0.25;

}  // namespace bqc
