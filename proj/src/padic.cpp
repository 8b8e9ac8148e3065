#include "bqc/padic.hpp"

#include "bqc/expsums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace bqc {

namespace {

Integer int_pow(i64 p, i64 e) { return boost::multiprecision::pow(Integer(p), static_cast<unsigned>(e)); }

int valuation(i128 v, i64 p, int cap) {
    if (v == 0) return cap;
    int k = 0;
    while (k < cap && v % p == 0) {
        v /= p;
        ++k;
    }
    return k;
}

int valuation(Integer v, i64 p, int cap) {
    if (v == 0) return cap;
    int k = 0;
    while (k < cap && v % p == 0) {
        v /= p;
        ++k;
    }
    return k;
}

bool is_good_prime(const QuadraticForm& f, i64 p) { return p % 2 == 1 && f.discriminant() % p != 0; }

// Number of nonzero x mod p with F(x) = 0 mod p, p odd, by solving for the
// last coordinate: p^{n-1} work instead of p^n.
i64 nonzero_zeros_mod_odd_prime(const std::vector<i64>& g, std::size_t n, i64 p) {
    std::vector<i64> m(n * n);
    for (std::size_t i = 0; i < n * n; ++i) m[i] = mod_floor(g[i], p);
    const std::size_t last = n - 1;
    const i64 a = m[last * n + last];
    std::vector<i64> x(last, 0);
    i64 total = 0;
    while (true) {
        i64 beta = 0, gamma = 0;
        for (std::size_t i = 0; i < last; ++i) {
            beta += 2 * m[i * n + last] * x[i];
            for (std::size_t j = 0; j < last; ++j) gamma += m[i * n + j] * x[i] % p * x[j];
            beta %= p;
            gamma %= p;
        }
        if (a != 0) {
            total += 1 + legendre(beta * beta - 4 * a * gamma, p);
        } else if (beta != 0) {
            total += 1;
        } else if (gamma == 0) {
            total += p;
        }
        std::size_t k = 0;
        while (k < last && x[k] + 1 == p) x[k++] = 0;
        if (k == last) break;
        ++x[k];
    }
    return total - 1;
}

class Descent {
public:
    Descent(const QuadraticForm& f, i64 p, int r, double budget)
        : n_(f.dim()), p_(p), r_(r), g_(f.gram_i64()), budget_(budget) {
        // F(x) for representatives x < p^r must fit comfortably in 128 bits.
        double h = 1;
        for (i64 v : g_) h = std::max(h, std::abs(static_cast<double>(v)));
        const double log2_bound = std::log2(static_cast<double>(n_ * n_) * h) + 2.0 * r * std::log2(static_cast<double>(p)) + 2;
        if (log2_bound > 120) throw std::overflow_error("count_mod: p^r too large for exact 128-bit descent");
        pow_.push_back(1);
        for (int k = 1; k <= 2 * r + 2; ++k) pow_.push_back(pow_.back() * p);
    }

    // Nonzero classes mod p, lifted to level r.
    Integer nonzero_part() {
        if (r_ == 0) return 0;
        Integer total = 0;
        std::vector<i64> x(n_, 0);
        charge(std::pow(static_cast<double>(p_), static_cast<double>(n_)));
        while (true) {
            std::size_t k = 0;
            while (k < n_ && x[k] + 1 == p_) x[k++] = 0;
            if (k == n_) break;
            ++x[k];
            if (evaluate(x) % p_ == 0) total += descend(x, 1);
        }
        return total;
    }

    int stable_level() const { return stable_; }
    double work() const { return work_; }

private:
    i128 evaluate(const std::vector<i64>& x) const {
        i128 s = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (x[i] == 0) continue;
            i128 row = 0;
            for (std::size_t j = 0; j < n_; ++j) row += static_cast<i128>(g_[i * n_ + j]) * x[j];
            s += row * x[i];
        }
        return s;
    }

    void charge(double w) {
        work_ += w;
        if (work_ > budget_) throw BudgetExceeded("count_mod: p=" + std::to_string(p_), work_, budget_);
    }

    // Number of y mod p^r with y = x mod p^k and F(y) = 0 mod p^r, given F(x) = 0 mod p^k.
    Integer descend(std::vector<i64>& x, int k) {
        if (k == r_) return 1;
        const int cap = r_ + 1;
        int nu = cap;
        for (std::size_t i = 0; i < n_; ++i) {
            i128 grad = 0;
            for (std::size_t j = 0; j < n_; ++j) grad += static_cast<i128>(g_[i * n_ + j]) * x[j];
            nu = std::min(nu, valuation(2 * grad, p_, cap));
        }
        const i128 fx = evaluate(x);
        if (k >= nu + 1) {
            // F(x + p^k t) = F(x) mod p^{k+nu}, and past that level the
            // normalized gradient is a unit, so every step keeps p^{n-1} lifts.
            stable_ = std::max(stable_, k + nu);
            if (r_ <= k + nu) return fx % pow_[r_] == 0 ? int_pow(p_, static_cast<i64>(n_) * (r_ - k)) : Integer(0);
            if (fx % pow_[k + nu] != 0) return 0;
            return int_pow(p_, static_cast<i64>(n_ - 1) * (r_ - k - nu) + static_cast<i64>(n_) * nu);
        }
        stable_ = std::max(stable_, k + 1);
        charge(std::pow(static_cast<double>(p_), static_cast<double>(n_)));
        Integer total = 0;
        const i64 step = static_cast<i64>(pow_[k]);
        std::vector<i64> child = x;
        std::vector<i64> t(n_, 0);
        while (true) {
            if (evaluate(child) % pow_[k + 1] == 0) total += descend(child, k + 1);
            std::size_t c = 0;
            while (c < n_ && t[c] + 1 == p_) {
                t[c] = 0;
                child[c] = x[c];
                ++c;
            }
            if (c == n_) break;
            ++t[c];
            child[c] += step;
        }
        return total;
    }

    std::size_t n_;
    i64 p_;
    int r_;
    std::vector<i64> g_;
    double budget_;
    double work_ = 0;
    int stable_ = 1;
    std::vector<i128> pow_;
};

struct NonzeroPart {
    Integer count;
    int stable_level;
};

NonzeroPart nonzero_part(const QuadraticForm& f, i64 p, int r, double budget) {
    if (r == 0) return {0, 0};
    const std::size_t n = f.dim();
    if (is_good_prime(f, p)) {
        // Every nonzero zero mod p is nonsingular and has p^{(n-1)(r-1)} lifts.
        const double work = std::pow(static_cast<double>(p), static_cast<double>(n - 1));
        if (work > budget) throw BudgetExceeded("count_mod: p=" + std::to_string(p), work, budget);
        const i64 n1 = nonzero_zeros_mod_odd_prime(f.gram_i64(), n, p);
        return {Integer(n1) * int_pow(p, static_cast<i64>(n - 1) * (r - 1)), 1};
    }
    Descent d(f, p, r, budget);
    Integer c = d.nonzero_part();
    return {c, d.stable_level()};
}

Integer count_mod_impl(const QuadraticForm& f, i64 p, int r, double budget, std::map<int, Integer>& memo) {
    if (r == 0) return 1;
    if (auto it = memo.find(r); it != memo.end()) return it->second;
    // x = 0 mod p: x = p x', F(x) = p^2 F(x'), so these classes number p^n N_{r-2}.
    Integer zero_part = r == 1 ? Integer(1) : int_pow(p, static_cast<i64>(f.dim())) * count_mod_impl(f, p, r - 2, budget, memo);
    Integer total = zero_part + nonzero_part(f, p, r, budget).count;
    memo[r] = total;
    return total;
}

}  // namespace

std::string to_string(DensityRoute route) {
    switch (route) {
        case DensityRoute::euler_product: return "euler_product";
        case DensityRoute::q_series: return "q_series";
        case DensityRoute::brute_mod: return "brute_mod";
    }
    return "unknown";
}

double DensityEstimate::param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw std::out_of_range("DensityEstimate: no parameter " + key);
}

LocalCount count_mod(const QuadraticForm& f, i64 p, int r, double budget) {
    if (!is_prime(p)) throw std::domain_error("count_mod: p must be prime");
    if (r < 0) throw std::domain_error("count_mod: r must be nonnegative");
    std::map<int, Integer> memo;
    return {p, r, count_mod_impl(f, p, r, budget, memo)};
}

DensityEstimate local_density(const QuadraticForm& f, i64 p, int r_max, double budget) {
    if (!f.is_nonsingular()) throw SingularForm("local_density: discriminant is zero");
    if (!is_prime(p)) throw std::domain_error("local_density: p must be prime");
    const std::size_t n = f.dim();
    if (n < 3) throw std::domain_error("local_density: requires n >= 3");
    if (r_max < 2) throw std::domain_error("local_density: r_max must be at least 2");

    const auto part = nonzero_part(f, p, r_max, budget);
    if (part.stable_level >= r_max)
        throw NotStabilized("local_density: p=" + std::to_string(p) + " not stabilized by r_max=" +
                            std::to_string(r_max));
    // A = C_r / p^{r(n-1)}, sigma_p = A / (1 - p^{-(n-2)}) = A p^{n-2} / (p^{n-2} - 1)
    const Integer pn2 = int_pow(p, static_cast<i64>(n) - 2);
    const Rational a(part.count, int_pow(p, static_cast<i64>(n - 1) * r_max));
    const Rational sigma = a * Rational(pn2, pn2 - 1);

    DensityEstimate est;
    est.value = static_cast<double>(sigma);
    est.tail_bound = 0;
    est.route = DensityRoute::brute_mod;
    est.params = {{"p", static_cast<double>(p)},
                  {"r_max", static_cast<double>(r_max)},
                  {"stable_level", static_cast<double>(part.stable_level)}};
    return est;
}

DensityEstimate singular_series_euler(const QuadraticForm& f, i64 p_max, double budget) {
    if (!f.is_nonsingular()) throw SingularForm("singular_series: discriminant is zero");
    const std::size_t n = f.dim();
    const Integer disc = abs(f.discriminant());
    double product = 1;
    for (i64 p : primes_up_to(p_max)) {
        const int v = valuation(2 * disc, p, 64);
        const int r_max = std::max(6, 2 * v + 2);
        product *= local_density(f, p, r_max, budget).value;
    }

    // Omitted primes. Good primes: |sigma_p - 1| <= sum_{j: nj even} p^{j(1-n/2)};
    // bad primes beyond p_max use the C q^{n/2+1+eps} gcd(q^n, Delta)^{1/2} envelope.
    const double P = static_cast<double>(std::max<i64>(p_max, 2));
    double tail_sum = 0;
    const double e = n % 2 == 1 ? 2.0 - static_cast<double>(n) : 1.0 - static_cast<double>(n) / 2.0;
    if (e < -1) {
        tail_sum += std::pow(P, e + 1) / (-e - 1) / (1 - std::pow(P, e));
    } else {
        tail_sum = std::numeric_limits<double>::infinity();
    }
    Integer rest = disc;
    for (i64 p = 2; p <= 1'000'000 && rest > 1; ++p) {
        if (rest % p != 0) continue;
        int v = 0;
        while (rest % p == 0) {
            rest /= p;
            ++v;
        }
        if (p <= p_max) continue;
        const double ep = 1 + kEnvelopeEps - static_cast<double>(n) / 2.0;
        const double pp = static_cast<double>(p);
        tail_sum += ep < 0 ? kEnvelopeC * std::pow(pp, v / 2.0) * std::pow(pp, ep) / (1 - std::pow(pp, ep))
                           : std::numeric_limits<double>::infinity();
    }
    if (rest > 1) tail_sum = std::numeric_limits<double>::infinity();

    DensityEstimate est;
    est.value = product;
    est.tail_bound = std::abs(product) * std::expm1(tail_sum);
    est.route = DensityRoute::euler_product;
    est.params = {{"p_max", static_cast<double>(p_max)}, {"C", kEnvelopeC}, {"eps", kEnvelopeEps}};
    return est;
}

DensityEstimate singular_series_qsum(const QuadraticForm& f, i64 q_max, double budget) {
    if (!f.is_nonsingular()) throw SingularForm("singular_series: discriminant is zero");
    const std::size_t n = f.dim();
    const std::vector<i64> zero(n, 0);
    std::map<i64, std::complex<double>> local;
    double total = 0;
    for (i64 q = 1; q <= q_max; ++q) {
        std::complex<double> s = 1.0;
        for (const auto& pp : factorize(q)) {
            auto it = local.find(pp.value);
            if (it == local.end()) it = local.emplace(pp.value, expsum(f, pp.value, zero, budget).value).first;
            s *= it->second;
        }
        total += s.real() / std::pow(static_cast<double>(q), static_cast<double>(n));
    }
    const double expo = 2.0 + kEnvelopeEps - static_cast<double>(n) / 2.0;
    const double disc = static_cast<double>(abs(f.discriminant()));
    const double tail = expo < 0 ? kEnvelopeC * std::sqrt(disc) * std::pow(static_cast<double>(q_max), expo) / (-expo)
                                 : std::numeric_limits<double>::infinity();
    DensityEstimate est;
    est.value = total;
    est.tail_bound = tail;
    est.route = DensityRoute::q_series;
    est.params = {{"q_max", static_cast<double>(q_max)}, {"C", kEnvelopeC}, {"eps", kEnvelopeEps}};
    return est;
}

DensityEstimate singular_series(const QuadraticForm& f, i64 q_max, i64 p_max, double budget) {
    if (f.dim() < 5) throw std::domain_error("singular_series: requires n >= 5");
    auto euler = singular_series_euler(f, p_max, budget);
    const auto qsum = singular_series_qsum(f, q_max, budget);
    euler.params.emplace_back("q_max", static_cast<double>(q_max));
    euler.params.emplace_back("q_series_value", qsum.value);
    euler.params.emplace_back("q_series_tail", qsum.tail_bound);
    return euler;
}

Integer joint_series_term(const BiquadraticForm& b, i64 q, double budget) {
    const std::size_t n = b.dim();
    const double work = std::pow(static_cast<double>(q), 2.0 * static_cast<double>(n));
    if (work > budget) throw BudgetExceeded("joint_singular_series: q=" + std::to_string(q), work, budget);
    if (q == 1) return 1;

    std::vector<i64> hist(static_cast<std::size_t>(q), 0);
    std::vector<i64> x(n, 0), y(n, 0), a(n * n, 0);
    while (true) {
        // a = coefficients of y_k y_l (k <= l) in F(x; y), reduced mod q.
        std::fill(a.begin(), a.end(), 0);
        for (const auto& t : b.terms())
            a[t.k * n + t.l] = mod_floor(a[t.k * n + t.l] + mod_floor(t.c, q) * x[t.i] % q * x[t.j], q);
        std::fill(y.begin(), y.end(), 0);
        while (true) {
            i64 v = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (y[k] == 0) continue;
                for (std::size_t l = k; l < n; ++l) v += a[k * n + l] * y[k] % q * y[l];
                v %= q;
            }
            ++hist[v];
            std::size_t c = 0;
            while (c < n && y[c] + 1 == q) y[c++] = 0;
            if (c == n) break;
            ++y[c];
        }
        std::size_t c = 0;
        while (c < n && x[c] + 1 == q) x[c++] = 0;
        if (c == n) break;
        ++x[c];
    }
    Integer total = 0;
    for (i64 u = 0; u < q; ++u)
        if (hist[u]) total += Integer(hist[u]) * ramanujan(q, u);
    return total;
}

DensityEstimate joint_singular_series(const BiquadraticForm& b, i64 q_max, double budget) {
    if (q_max < 1) throw std::domain_error("joint_singular_series: q_max must be positive");
    const std::size_t n = b.dim();
    Rational sum = 0;
    Rational last = 0;
    for (i64 q = 1; q <= q_max; ++q) {
        last = Rational(joint_series_term(b, q, budget), int_pow(q, 2 * static_cast<i64>(n)));
        sum += last;
    }
    DensityEstimate est;
    est.value = static_cast<double>(sum);
    est.tail_bound = std::abs(static_cast<double>(last));
    est.route = DensityRoute::q_series;
    est.params = {{"q_max", static_cast<double>(q_max)}};
    return est;
}

}  // namespace bqc
