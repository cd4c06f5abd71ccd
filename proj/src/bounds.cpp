#include "raptor/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace raptor {

namespace {

double powi(double base, int e) {
    double acc = 1.0;
    double b = base;
    for (int x = e; x > 0; x >>= 1) {
        if (x & 1)
            acc *= b;
        b *= b;
    }
    return acc;
}

// C(a,b) in floating point by the multiplicative recurrence.
double binom(int a, int b) {
    if (b < 0 || b > a)
        return 0.0;
    b = std::min(b, a - b);
    double v = 1.0;
    for (int j = 1; j <= b; ++j)
        v = v * (a - b + j) / j;
    return v;
}

double log_binom(int a, int b) {
    if (b < 0 || b > a)
        return -std::numeric_limits<double>::infinity();
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

} // namespace

namespace detail {

double hyper_even_direct(int r, int d, int n) {
    const int s_min = std::max(0, d - (n - r));
    const int s_max = std::min(r, d);
    if (s_min > s_max)
        return 0.0;
    // p(s) = C(r,s) C(n-r,d-s) / C(n,d), advanced one s at a time
    double p = binom(r, s_min) * binom(n - r, d - s_min) / binom(n, d);
    double sum = (s_min % 2 == 0) ? p : 0.0;
    for (int s = s_min; s < s_max; ++s) {
        p *= static_cast<double>(r - s) * (d - s) /
             (static_cast<double>(s + 1) * ((n - r) - (d - s) + 1));
        if ((s + 1) % 2 == 0)
            sum += p;
    }
    return sum;
}

double hyper_even_log(int r, int d, int n) {
    const int s_min = std::max(0, d - (n - r));
    const int s_max = std::min(r, d);
    const double log_denom = log_binom(n, d);
    double sum = 0.0;
    double comp = 0.0; // Kahan compensation
    for (int s = s_min + (s_min % 2); s <= s_max; s += 2) {
        const double term =
            std::exp(log_binom(r, s) + log_binom(n - r, d - s) - log_denom);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace detail

double j_of_r(int r, int n, const DegreeDistribution& omega) {
    if (r < 0 || r > n)
        throw std::invalid_argument("j_of_r: r outside 0..n");
    if (omega.support() != n)
        throw std::invalid_argument("j_of_r: omega support must equal n");
    const bool log_domain = n > 100;
    double sum = 0.0;
    double comp = 0.0;
    for (int d = 1; d <= n; ++d) {
        const double w = omega.pmf(d);
        if (w == 0.0)
            continue;
        const double h =
            log_domain ? detail::hyper_even_log(r, d, n) : detail::hyper_even_direct(r, d, n);
        const double y = w * h - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return clamp01(sum);
}

double d_of_ir(int i, int r, int k, int n, double eta) {
    if (i < 0 || i > k)
        throw std::invalid_argument("d_of_ir: i outside 0..k");
    if (i == 0)
        return r == 0 ? 1.0 : 0.0;
    if (r < i || r > n - k + i)
        return 0.0;
    const double t = powi(1.0 - 2.0 * eta, i);
    const double even = (1.0 + t) / 2.0; // per-entry probability of an even row sum
    const double odd = (1.0 - t) / 2.0;
    return binom(n - k, r - i) * powi(even, n - k - r + i) * powi(odd, r - i);
}

BoundTables::BoundTables(const RaptorConfig& cfg) : k_(cfg.k), n_(cfg.n) {
    j_.resize(static_cast<std::size_t>(n_) + 1);
    for (int r = 0; r <= n_; ++r)
        j_[static_cast<std::size_t>(r)] = j_of_r(r, n_, cfg.omega);

    d_.assign(static_cast<std::size_t>(k_) + 1,
              std::vector<double>(static_cast<std::size_t>(n_) + 1, 0.0));
    for (int i = 0; i <= k_; ++i)
        for (int r = 0; r <= n_; ++r)
            d_[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] =
                d_of_ir(i, r, k_, n_, cfg.eta);

    // Flatten the Bonferroni quintuple sum into (coefficient, base) pairs.
    std::vector<std::pair<double, double>> terms;
    for (int i = 1; i <= k_; ++i) {
        const double c_ki = binom(k_, i);
        for (int w0 = 0; w0 <= i; ++w0) {
            const int w1 = i - w0;
            for (int w2 = 0; w2 <= k_ - i; ++w2) {
                if (w0 + w2 == 0 || w1 + w2 == 0)
                    continue;
                const double coeff = 0.5 * c_ki * binom(i, w0) * binom(k_ - i, w2);
                for (int r0 = w0; r0 <= n_ - k_ + w0; ++r0) {
                    const double d0 = d(w0, r0);
                    if (d0 == 0.0)
                        continue;
                    const double j0 = j(r0);
                    for (int r1 = w1; r1 <= n_ - k_ + w1; ++r1) {
                        const double d1 = d(w1, r1);
                        if (d1 == 0.0)
                            continue;
                        const double j1 = j(r1);
                        for (int r2 = w2; r2 <= n_ - k_ + w2; ++r2) {
                            const double d2 = d(w2, r2);
                            if (d2 == 0.0)
                                continue;
                            const double j2 = j(r2);
                            const double base = j0 * j1 * j2 +
                                                (1.0 - j0) * (1.0 - j1) * (1.0 - j2);
                            terms.emplace_back(base, coeff * d0 * d1 * d2);
                        }
                    }
                }
            }
        }
    }
    std::sort(terms.begin(), terms.end());
    for (const auto& [base, coeff] : terms) {
        if (!pair_terms_.empty() && pair_terms_.back().second == base)
            pair_terms_.back().first += coeff;
        else
            pair_terms_.emplace_back(coeff, base);
    }
}

double BoundTables::d(int i, int r) const {
    if (r < 0 || r > n_)
        return 0.0;
    return d_[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
}

double BoundTables::lower_raw(int m) const {
    if (m < 0)
        throw std::invalid_argument("lower_raw: m must be >= 0");
    double sum = 0.0;
    for (int i = 1; i <= k_; ++i) {
        const double c_ki = binom(k_, i);
        double inner = 0.0;
        for (int r = i; r <= n_ - k_ + i; ++r)
            inner += powi(j(r), m) * d(i, r);
        sum += c_ki * inner;
    }
    return 1.0 - sum;
}

double BoundTables::upper_raw(int m) const {
    double second = 0.0;
    for (const auto& [coeff, base] : pair_terms_)
        second += coeff * powi(base, m);
    return lower_raw(m) + second;
}

BoundPoint BoundTables::evaluate(int m) const {
    BoundPoint p;
    p.m = m;
    p.gamma = static_cast<double>(m) / k_;
    p.lower_raw = lower_raw(m);
    p.upper_raw = upper_raw(m);
    p.lower = clamp01(p.lower_raw);
    p.upper = clamp01(p.upper_raw);
    return p;
}

namespace {

// (2^(n-1) - 1)/(2^n - 1) as 0.5 * (1 - 2^(1-n))/(1 - 2^-n), stable for any n
double corollary_rho(int n) {
    const double a = -std::expm1(-(n - 1) * std::log(2.0));
    const double b = -std::expm1(-n * std::log(2.0));
    return 0.5 * a / b;
}

double pow2m1(int k) { return std::exp2(static_cast<double>(k)) - 1.0; }

} // namespace

double corollary_lower_raw(int m, int k, int n) {
    if (m < 0 || k < 1 || n < k)
        throw std::invalid_argument("corollary_lower: need m >= 0, n >= k >= 1");
    return 1.0 - pow2m1(k) * powi(corollary_rho(n), m);
}

double corollary_upper_raw(int m, int k, int n) {
    const double rho = corollary_rho(n);
    const double base = powi(rho, 3) + powi(1.0 - rho, 3);
    return corollary_lower_raw(m, k, n) + pow2m1(k) * pow2m1(k - 1) * powi(base, m);
}

double corollary_lower(int m, int k, int n) { return clamp01(corollary_lower_raw(m, k, n)); }

double corollary_upper(int m, int k, int n) { return clamp01(corollary_upper_raw(m, k, n)); }

double bec_success(int T, double p, const std::function<double(int)>& curve, int k) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("bec_success: p outside [0,1]");
    if (T < 0)
        throw std::invalid_argument("bec_success: T must be >= 0");
    if (T < k)
        return 0.0;
    double sum = 0.0;
    // C(T,m) advanced by ratio from C(T,k)
    double c = binom(T, k);
    for (int m = k; m <= T; ++m) {
        const double weight = c * std::pow(p, T - m) * std::pow(1.0 - p, m);
        sum += weight * curve(m);
        c = c * (T - m) / (m + 1);
    }
    return clamp01(sum);
}

} // namespace raptor
