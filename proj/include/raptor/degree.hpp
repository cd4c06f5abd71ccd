#pragma once

#include <string>
#include <vector>

#include "raptor/rng.hpp"

namespace raptor {

// Degree distribution of an LT code over degrees 1..n. Immutable after
// construction; sampling takes an external rng so concurrent samplers use
// independent streams.
class DegreeDistribution {
public:
    /// Omega_1 = 1/n, Omega_d = 1/(d(d-1)) for 2 <= d <= n.
    static DegreeDistribution ideal_soliton(int n);

    /// Luby's robust soliton: mu = (rho + tau)/beta with R = c*ln(n/delta)*sqrt(n)
    /// and the spike at round(n/R). A spike index outside 1..n is clamped and
    /// flagged via spike_clamped().
    static DegreeDistribution robust_soliton(int n, double c, double delta);

    /// The standardized broadcast distribution with mass at degrees
    /// 1,2,3,4,10,11; requires support n >= 11.
    static DegreeDistribution standard_3gpp(int n);

    /// Omega_d = C(n,d)/(2^n - 1): an LT row is uniform over nonzero vectors.
    static DegreeDistribution binomial(int n);

    static DegreeDistribution point_mass(int n, int d);

    // "d p" pairs, one per line, '#' comments. A total probability off by
    // less than 1e-9 is renormalized, anything worse is rejected.
    static DegreeDistribution from_file(const std::string& path);
    static DegreeDistribution from_table(const std::vector<std::pair<int, double>>& entries,
                                         const std::string& name);

    int support() const { return n_; }
    double pmf(int d) const { return pmf_[static_cast<std::size_t>(d)]; }
    const std::string& name() const { return name_; }
    bool spike_clamped() const { return spike_clamped_; }

    // Inverse-CDF sampling; returns a degree in 1..n.
    int sample(Rng& rng) const;

    double mean_degree() const;

private:
    DegreeDistribution(int n, std::vector<double> pmf, std::string name, bool clamped = false);
    void validate() const;

    int n_ = 0;
    std::vector<double> pmf_; // index 0 unused
    std::vector<double> cdf_;
    std::string name_;
    bool spike_clamped_ = false;
};

} // namespace raptor
