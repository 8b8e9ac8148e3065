#include "bqc/archimedean.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqc {

namespace {

double psi(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

double sup_abs(std::span<const double> u) {
    double r = 0;
    for (double v : u) r = std::max(r, std::abs(v));
    return r;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void check_schedule(const MonteCarloParams& params) {
    const auto& s = params.delta_schedule;
    if (s.empty()) throw std::invalid_argument("delta schedule is empty");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0)) throw std::invalid_argument("delta schedule entries must be positive");
        if (i > 0 && !(s[i] < s[i - 1])) throw std::invalid_argument("delta schedule must be strictly decreasing");
    }
    if (params.samples < 2) throw std::invalid_argument("need at least two samples");
}

// Shared sampler. `eval` maps a point of [-radius, radius]^dim to
// (weight, form value); every schedule level reuses the same points.
template <class Eval>
IntegralEstimate kernel_monte_carlo(std::size_t dim, double radius, const MonteCarloParams& params, Eval&& eval,
                                    const SampleMap& map) {
    check_schedule(params);
    const auto& deltas = params.delta_schedule;
    const std::size_t levels = deltas.size();
    const double volume = std::pow(2.0 * radius, static_cast<double>(dim));

    // Linear extrapolation of the last two levels to delta = 0.
    double c_last = 1, c_prev = 0;
    if (levels >= 2) {
        const double d1 = deltas[levels - 2], d2 = deltas[levels - 1];
        c_last = 1 + d2 / (d1 - d2);
        c_prev = -d2 / (d1 - d2);
    }

    // Index `levels` holds the extrapolated combination.
    std::vector<long double> sum(levels + 1, 0), sumsq(levels + 1, 0);
    std::vector<double> chunk_sum(levels + 1), chunk_sq(levels + 1), g(levels);
    std::vector<double> point(dim);
    constexpr std::uint64_t kChunk = 1 << 16;

    for (std::uint64_t start = 0; start < params.samples; start += kChunk) {
        std::fill(chunk_sum.begin(), chunk_sum.end(), 0.0);
        std::fill(chunk_sq.begin(), chunk_sq.end(), 0.0);
        const std::uint64_t stop = std::min(params.samples, start + kChunk);
        for (std::uint64_t i = start; i < stop; ++i) {
            for (std::size_t j = 0; j < dim; ++j)
                point[j] = radius * (2.0 * uniform_at(params.seed, i * dim + j) - 1.0);
            if (map) map(point);
            const auto [weight, value] = eval(std::span<const double>(point));
            if (weight == 0) continue;
            if (std::abs(value) >= deltas.front()) continue;
            for (std::size_t l = 0; l < levels; ++l) {
                g[l] = volume * weight * kernel_K(-value, deltas[l]);
                chunk_sum[l] += g[l];
                chunk_sq[l] += g[l] * g[l];
            }
            const double ext = levels >= 2 ? c_last * g[levels - 1] + c_prev * g[levels - 2] : g[0];
            chunk_sum[levels] += ext;
            chunk_sq[levels] += ext * ext;
        }
        for (std::size_t l = 0; l <= levels; ++l) {
            sum[l] += chunk_sum[l];
            sumsq[l] += chunk_sq[l];
        }
    }

    const auto n = static_cast<long double>(params.samples);
    auto mean_se = [&](std::size_t l) {
        const long double mean = sum[l] / n;
        long double var = (sumsq[l] / n - mean * mean) * n / (n - 1);
        if (var < 0) var = 0;
        return std::pair<double, double>{static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
    };

    IntegralEstimate est;
    est.delta_schedule = deltas;
    est.samples = params.samples;
    est.seed = params.seed;
    for (std::size_t l = 0; l < levels; ++l) {
        const auto [m, se] = mean_se(l);
        est.level_values.push_back(m);
        est.level_stderrs.push_back(se);
    }
    const auto [m, se] = mean_se(levels);
    est.value = m;
    est.mc_stderr = se;

    if (params.require_convergence && levels >= 2) {
        const double a = est.level_values[levels - 2], b = est.level_values[levels - 1];
        const double sa = est.level_stderrs[levels - 2], sb = est.level_stderrs[levels - 1];
        if (std::abs(a - b) > 5.0 * std::hypot(sa, sb))
            throw NonConvergent("delta schedule not converged: levels " + std::to_string(a) + " and " +
                                std::to_string(b) + " differ by more than 5 combined standard errors");
    }
    return est;
}

}  // namespace

double smooth_step(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    const double a = psi(t), b = psi(1.0 - t);
    return a / (a + b);
}

WeightFunction WeightFunction::box(double kappa) {
    if (!(kappa > 0)) throw std::invalid_argument("box weight: kappa must be positive");
    WeightFunction w;
    w.kind_ = WeightKind::box;
    w.kappa_ = kappa;
    w.support_ = kappa;
    w.name_ = "w0";
    return w;
}

WeightFunction WeightFunction::annular_w1(double eta) {
    if (!(eta > 0 && eta < 0.25)) throw std::invalid_argument("annular weight: eta must lie in (0, 1/4)");
    WeightFunction w;
    w.kind_ = WeightKind::annular_w1;
    w.eta_ = eta;
    w.support_ = 1.0;
    w.name_ = "w1";
    return w;
}

WeightFunction WeightFunction::annular_w2(double eta) {
    if (!(eta > 0 && eta < 0.25)) throw std::invalid_argument("annular weight: eta must lie in (0, 1/4)");
    WeightFunction w;
    w.kind_ = WeightKind::annular_w2;
    w.eta_ = eta;
    w.support_ = 1.0 + eta;
    w.name_ = "w2";
    return w;
}

WeightFunction WeightFunction::custom(Custom fn, double support_radius, std::string name) {
    WeightFunction w;
    w.kind_ = WeightKind::custom;
    w.custom_ = std::move(fn);
    w.support_ = support_radius;
    w.name_ = std::move(name);
    return w;
}

double WeightFunction::radial(double r) const {
    switch (kind_) {
        case WeightKind::box: return r <= kappa_ ? 1.0 : 0.0;
        case WeightKind::annular_w1: return smooth_step((r - eta_) / eta_) * smooth_step((1.0 - r) / eta_);
        case WeightKind::annular_w2: return smooth_step((r - eta_) / eta_) * smooth_step((1.0 + eta_ - r) / eta_);
        case WeightKind::custom: break;
    }
    throw std::logic_error("custom weights have no radial form");
}

double WeightFunction::operator()(std::span<const double> u) const {
    if (kind_ == WeightKind::custom) return custom_(u);
    return radial(sup_abs(u));
}

double WeightFunction::support_radius() const { return support_; }

double kernel_K(double u, double delta) {
    if (!(delta > 0)) throw std::domain_error("kernel_K: delta must be positive");
    const double a = std::abs(u);
    return a < delta ? (delta - a) / (delta * delta) : 0.0;
}

double uniform_at(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t z = splitmix64(splitmix64(seed) ^ (counter * 0xD1B54A32D192ED03ULL));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

IntegralEstimate sigma_infinity(const QuadraticForm& f, const WeightFunction& w, const MonteCarloParams& params) {
    if (!f.is_nonsingular()) throw SingularForm("sigma_infinity: discriminant is zero");
    const std::size_t n = f.dim();
    const auto& g = f.gram_i64();
    std::vector<double> m(g.begin(), g.end());
    auto eval = [&](std::span<const double> x) {
        const double weight = w(x);
        if (weight == 0) return std::pair<double, double>{0.0, 0.0};
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0;
            for (std::size_t j = 0; j < n; ++j) row += m[i * n + j] * x[j];
            s += row * x[i];
        }
        return std::pair<double, double>{weight, s};
    };
    return kernel_monte_carlo(n, w.support_radius(), params, eval, {});
}

IntegralEstimate joint_singular_integral(const BiquadraticForm& b, const MonteCarloParams& params,
                                         const SampleMap& map) {
    const std::size_t n = b.dim();
    auto eval = [&](std::span<const double> pt) {
        return std::pair<double, double>{1.0, b.evaluate(pt.first(n), pt.subspan(n, n))};
    };
    return kernel_monte_carlo(2 * n, 1.0, params, eval, map);
}

MainTerm predicted_main_term(const QuadraticForm& f, const IntegralEstimate& sigma_inf,
                             const DensityEstimate& series, double B) {
    const std::size_t n = f.dim();
    if (n < 5) throw std::domain_error("predicted_main_term: requires n >= 5");
    MainTerm t;
    t.sigma_infinity = sigma_inf.value;
    t.singular_series = series.value;
    t.scale = std::pow(B, static_cast<double>(n - 2));
    t.value = sigma_inf.value * series.value * t.scale;
    t.uncertainty = t.scale * std::hypot(sigma_inf.mc_stderr * series.value, sigma_inf.value * series.tail_bound);
    return t;
}

MainTerm predicted_main_term(const QuadraticForm& f, const WeightFunction& w, double B, const MonteCarloParams& mc,
                             i64 q_max, i64 p_max, double budget) {
    const auto sigma = sigma_infinity(f, w, mc);
    const auto series = singular_series(f, q_max, p_max, budget);
    return predicted_main_term(f, sigma, series, B);
}

}  // namespace bqc
