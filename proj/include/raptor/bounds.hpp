#pragma once

#include <functional>
#include <vector>

#include "raptor/codec.hpp"

namespace raptor {

// Probability that a random LT row has even overlap with a fixed weight-r
// vector: sum over d of Omega_d * [sum over even s of C(r,s)C(n-r,d-s)]/C(n,d).
double j_of_r(int r, int n, const DegreeDistribution& omega);

// Probability that the XOR of i pre-code generator columns has weight r:
// C(n-k, r-i) * [(1+(1-2eta)^i)/2]^(n-k-r+i) * [(1-(1-2eta)^i)/2]^(r-i).
// i = 0 is the empty XOR (point mass at r = 0); r outside [i, n-k+i] gives 0.
double d_of_ir(int i, int r, int k, int n, double eta);

struct BoundPoint {
    int m = 0;
    double gamma = 0.0;
    double lower_raw = 0.0; // may be negative in the loose regime
    double upper_raw = 0.0;
    double lower = 0.0; // clamped to [0,1]
    double upper = 0.0;
};

// J(r) and D(i,r) precomputed once per configuration; bound evaluations are
// pure and reentrant, so m-sweeps may run in parallel over m.
class BoundTables {
public:
    explicit BoundTables(const RaptorConfig& cfg);

    double j(int r) const { return j_[static_cast<std::size_t>(r)]; }
    double d(int i, int r) const;
    int k() const { return k_; }
    int n() const { return n_; }

    // Union-bound lower value (may be negative for small m).
    double lower_raw(int m) const;
    // Lower value plus the pairwise Bonferroni correction term.
    double upper_raw(int m) const;

    BoundPoint evaluate(int m) const;

private:
    int k_;
    int n_;
    std::vector<double> j_;              // r = 0..n
    std::vector<std::vector<double>> d_; // [i][r], i = 0..k, r = 0..n
    // Bonferroni term flattened to (coefficient, base) pairs with equal bases
    // merged; an m-sweep then reuses every m-independent product.
    std::vector<std::pair<double, double>> pair_terms_;
};

// Closed forms for the binomial degree distribution.
double corollary_lower_raw(int m, int k, int n);
double corollary_upper_raw(int m, int k, int n);
double corollary_lower(int m, int k, int n); // clamped
double corollary_upper(int m, int k, int n);

// Success probability over a BEC after T transmissions:
// P_suc(T) = sum_{m=k..T} C(T,m) curve(m) p^(T-m) (1-p)^m.
// `curve` supplies Pr(A_m^k) for m in k..T (a bound, an MC estimate, or the
// ideal-fountain constant 1).
double bec_success(int T, double p, const std::function<double(int)>& curve, int k);

namespace detail {
// Even-overlap hypergeometric sum, ratio-recurrence and log-domain routes.
double hyper_even_direct(int r, int d, int n);
double hyper_even_log(int r, int d, int n);
} // namespace detail

} // namespace raptor
