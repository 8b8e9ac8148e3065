#pragma once

// Weight functions, the triangular kernel K(u; delta), and Monte Carlo
// estimates of the singular integrals
//
//   sigma_inf(w; F) = lim_{delta -> 0} int w(x) K(-F(x); delta) dx
//   T               = lim_{delta -> 0} int_{[-1,1]^{2n}} K(-F(x;y); delta) dx dy

#include "bqc/arith.hpp"
#include "bqc/errors.hpp"
#include "bqc/forms.hpp"
#include "bqc/padic.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bqc {

enum class WeightKind { box, annular_w1, annular_w2, custom };

// Smooth step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);

class WeightFunction {
public:
    using Custom = std::function<double(std::span<const double>)>;

    // Indicator of |u| <= kappa (sup-norm).
    static WeightFunction box(double kappa = 1.0);
    // Vanishes for |u| <= eta and |u| >= 1, equals 1 on 2 eta <= |u| <= 1 - eta.
    static WeightFunction annular_w1(double eta);
    // Vanishes for |u| <= eta and |u| >= 1 + eta, equals 1 on 2 eta <= |u| <= 1.
    static WeightFunction annular_w2(double eta);
    static WeightFunction custom(Custom fn, double support_radius, std::string name = "custom");

    double operator()(std::span<const double> u) const;
    // Same weight as a function of the sup-norm radius; not available for custom weights.
    double radial(double radius) const;

    WeightKind kind() const { return kind_; }
    double eta() const { return eta_; }
    double kappa() const { return kappa_; }
    // w vanishes outside the sup-norm ball of this radius.
    double support_radius() const;
    const std::string& name() const { return name_; }

private:
    WeightKind kind_ = WeightKind::box;
    double eta_ = 0;
    double kappa_ = 1;
    double support_ = 1;
    Custom custom_;
    std::string name_;
};

// delta^{-2} (delta - |u|) on |u| <= delta, 0 elsewhere.
double kernel_K(double u, double delta);

struct MonteCarloParams {
    std::vector<double> delta_schedule{0.2, 0.1, 0.05, 0.025};
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    // When false, the per-delta levels are returned without the convergence check.
    bool require_convergence = true;
};

struct IntegralEstimate {
    double value = 0;
    double mc_stderr = 0;
    std::vector<double> delta_schedule;
    std::vector<double> level_values;   // sigma^{(delta)} for each schedule entry
    std::vector<double> level_stderrs;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Counter-based uniform variate in [0, 1) for (seed, counter).
double uniform_at(std::uint64_t seed, std::uint64_t counter);

// Applied to each sample point (in the integration box) before evaluation.
using SampleMap = std::function<void(std::span<double>)>;

// Monte Carlo estimate at every delta of the schedule from one shared sample
// stream, then linear extrapolation of the last two levels to delta = 0.
// Throws NonConvergent when the last two levels differ by more than five
// combined standard errors.
IntegralEstimate sigma_infinity(const QuadraticForm& f, const WeightFunction& w, const MonteCarloParams& params);

IntegralEstimate joint_singular_integral(const BiquadraticForm& b, const MonteCarloParams& params,
                                         const SampleMap& map = {});

struct MainTerm {
    double value = 0;
    double uncertainty = 0;
    double sigma_infinity = 0;
    double singular_series = 0;
    double scale = 0;  // B^{n-2}
};

// sigma_inf(w; F) * S(F) * B^{n-2}; requires n >= 5.
MainTerm predicted_main_term(const QuadraticForm& f, const IntegralEstimate& sigma_inf,
                             const DensityEstimate& series, double B);
MainTerm predicted_main_term(const QuadraticForm& f, const WeightFunction& w, double B,
                             const MonteCarloParams& mc, i64 q_max = 40, i64 p_max = 40,
                             double budget = kDefaultBudget);

}  // namespace bqc
