#include "raptor/degree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace raptor {

namespace {
constexpr double kSumTolerance = 1e-12;
}

DegreeDistribution::DegreeDistribution(int n, std::vector<double> pmf, std::string name,
                                       bool clamped)
    : n_(n), pmf_(std::move(pmf)), name_(std::move(name)), spike_clamped_(clamped) {
    validate();
    cdf_.assign(pmf_.size(), 0.0);
    double acc = 0.0;
    for (int d = 1; d <= n_; ++d) {
        acc += pmf_[static_cast<std::size_t>(d)];
        cdf_[static_cast<std::size_t>(d)] = acc;
    }
    cdf_[static_cast<std::size_t>(n_)] = 1.0; // pin the tail against roundoff
}

void DegreeDistribution::validate() const {
    if (n_ < 1)
        throw std::invalid_argument("DegreeDistribution: support must be >= 1");
    if (static_cast<int>(pmf_.size()) != n_ + 1)
        throw std::invalid_argument("DegreeDistribution: pmf size mismatch");
    double sum = 0.0;
    for (int d = 1; d <= n_; ++d) {
        const double p = pmf_[static_cast<std::size_t>(d)];
        if (p < 0.0 || !std::isfinite(p))
            throw std::invalid_argument("DegreeDistribution: negative pmf entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw std::invalid_argument("DegreeDistribution: pmf does not sum to 1");
}

DegreeDistribution DegreeDistribution::ideal_soliton(int n) {
    if (n < 1)
        throw std::invalid_argument("ideal_soliton: n must be >= 1");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    pmf[1] = 1.0 / n;
    for (int d = 2; d <= n; ++d)
        pmf[static_cast<std::size_t>(d)] = 1.0 / (static_cast<double>(d) * (d - 1));
    return DegreeDistribution(n, std::move(pmf), "ideal");
}

DegreeDistribution DegreeDistribution::robust_soliton(int n, double c, double delta) {
    if (n < 2)
        throw std::invalid_argument("robust_soliton: n must be >= 2");
    if (!(c > 0.0))
        throw std::invalid_argument("robust_soliton: c must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("robust_soliton: delta must be in (0,1)");

    std::vector<double> rho(static_cast<std::size_t>(n) + 1, 0.0);
    rho[1] = 1.0 / n;
    for (int d = 2; d <= n; ++d)
        rho[static_cast<std::size_t>(d)] = 1.0 / (static_cast<double>(d) * (d - 1));

    const double r_param = c * std::log(n / delta) * std::sqrt(static_cast<double>(n));
    long long spike = std::llround(n / r_param);
    bool clamped = false;
    if (spike > n) {
        spike = n;
        clamped = true;
    }
    if (spike < 1) {
        spike = 1;
        clamped = true;
    }

    std::vector<double> tau(static_cast<std::size_t>(n) + 1, 0.0);
    for (int d = 1; d < spike; ++d)
        tau[static_cast<std::size_t>(d)] = r_param / (static_cast<double>(d) * n);
    double spike_mass = r_param * std::log(r_param / delta) / n;
    if (spike_mass < 0.0) { // degenerate R < delta regime
        spike_mass = 0.0;
        clamped = true;
    }
    tau[static_cast<std::size_t>(spike)] += spike_mass;

    double beta = 0.0;
    for (int d = 1; d <= n; ++d)
        beta += rho[static_cast<std::size_t>(d)] + tau[static_cast<std::size_t>(d)];
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    for (int d = 1; d <= n; ++d)
        pmf[static_cast<std::size_t>(d)] =
            (rho[static_cast<std::size_t>(d)] + tau[static_cast<std::size_t>(d)]) / beta;

    std::ostringstream name;
    name << "robust(" << c << "," << delta << ")";
    return DegreeDistribution(n, std::move(pmf), name.str(), clamped);
}

DegreeDistribution DegreeDistribution::standard_3gpp(int n) {
    if (n < 11)
        throw std::invalid_argument("standard_3gpp: support must be >= 11");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    pmf[1] = 0.0099;
    pmf[2] = 0.4663;
    pmf[3] = 0.2144;
    pmf[4] = 0.1152;
    pmf[10] = 0.1131;
    pmf[11] = 0.0811;
    return DegreeDistribution(n, std::move(pmf), "3gpp");
}

DegreeDistribution DegreeDistribution::binomial(int n) {
    if (n < 1)
        throw std::invalid_argument("binomial: n must be >= 1");
    if (n > 1023)
        throw std::invalid_argument("binomial: support too large for closed-form weights");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    // C(n,d)/(2^n - 1) via the multiplicative recurrence C(n,d) = C(n,d-1)*(n-d+1)/d
    const double denom = std::pow(2.0, n) - 1.0;
    double binom = 1.0;
    for (int d = 1; d <= n; ++d) {
        binom = binom * (n - d + 1) / d;
        pmf[static_cast<std::size_t>(d)] = binom / denom;
    }
    return DegreeDistribution(n, std::move(pmf), "binomial");
}

DegreeDistribution DegreeDistribution::point_mass(int n, int d) {
    if (d < 1 || d > n)
        throw std::invalid_argument("point_mass: degree outside 1..n");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    pmf[static_cast<std::size_t>(d)] = 1.0;
    return DegreeDistribution(n, std::move(pmf), "pm" + std::to_string(d));
}

DegreeDistribution DegreeDistribution::from_table(
    const std::vector<std::pair<int, double>>& entries, const std::string& name) {
    if (entries.empty())
        throw std::invalid_argument("degree table: empty");
    int n = 0;
    for (const auto& [d, p] : entries) {
        if (d < 1)
            throw std::invalid_argument("degree table: degree must be >= 1");
        if (p < 0.0 || !std::isfinite(p))
            throw std::invalid_argument("degree table: invalid probability");
        n = std::max(n, d);
    }
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    for (const auto& [d, p] : entries) {
        if (pmf[static_cast<std::size_t>(d)] != 0.0)
            throw std::invalid_argument("degree table: duplicate degree " + std::to_string(d));
        pmf[static_cast<std::size_t>(d)] = p;
    }
    double sum = 0.0;
    for (int d = 1; d <= n; ++d)
        sum += pmf[static_cast<std::size_t>(d)];
    if (std::abs(sum - 1.0) >= 1e-9)
        throw std::invalid_argument("degree table: probabilities sum to " + std::to_string(sum) +
                                    ", outside the renormalizable band");
    for (int d = 1; d <= n; ++d)
        pmf[static_cast<std::size_t>(d)] /= sum;
    return DegreeDistribution(n, std::move(pmf), name);
}

DegreeDistribution DegreeDistribution::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("degree table: cannot open " + path);
    std::vector<std::pair<int, double>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        int d;
        double p;
        if (!(ls >> d))
            continue; // blank or comment-only line
        if (!(ls >> p))
            throw std::runtime_error("degree table: " + path + ":" + std::to_string(lineno) +
                                     ": expected \"d p\"");
        entries.emplace_back(d, p);
    }
    return from_table(entries, "file:" + path);
}

int DegreeDistribution::sample(Rng& rng) const {
    const double u = rng.next_double();
    const auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), u);
    int d = static_cast<int>(it - cdf_.begin());
    if (d > n_)
        d = n_;
    // u can only land on a zero-mass degree through the roundoff gap between
    // the accumulated sum and the pinned tail; snap to the nearest mass below
    while (d > 1 && pmf_[static_cast<std::size_t>(d)] == 0.0)
        --d;
    return d;
}

double DegreeDistribution::mean_degree() const {
    double m = 0.0;
    for (int d = 1; d <= n_; ++d)
        m += d * pmf_[static_cast<std::size_t>(d)];
    return m;
}

} // namespace raptor
