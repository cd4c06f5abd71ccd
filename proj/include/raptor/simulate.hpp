#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raptor/bounds.hpp"
#include "raptor/codec.hpp"

namespace raptor {

struct SweepRecord {
    int k = 0;
    int n = 0;
    double eta = 0.0;
    std::string omega;
    int m = 0;
    double gamma = 0.0;
    long long trials = 0; // 0 when no Monte Carlo ran (bounds/exact records)
    std::uint64_t seed = 0;
    std::optional<double> mc_estimate;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> exact;

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct ChannelBec {
    double p = 0.0; // per-packet erasure probability
    int t = 0;      // transmitted packet count
};

struct BecPoint {
    ChannelBec channel;
    double p_suc = 0.0;       // Raptor curve, chosen source
    double p_suc_ideal = 0.0; // ideal fountain reference
};

enum class CurveSource { mc, lower, upper, ideal };

struct WilsonCi {
    double low = 0.0;
    double high = 0.0;
};
// 95% Wilson score interval for `successes` out of `trials`.
WilsonCi wilson95(long long successes, long long trials);

// Monte Carlo estimate of Pr(A_m^k): every trial draws a fresh pre-code and
// m LT rows and tests decodability. Per-trial rng streams are derived from
// (seed, m, trial), so the result is identical for any worker count.
SweepRecord estimate(const RaptorConfig& cfg, int m, long long trials, std::uint64_t seed,
                     int workers = 1);

struct BudgetError : std::runtime_error {
    explicit BudgetError(double required_terms);
    double required = 0.0;
};

// Exact Pr(A_m^k): sums over all pre-code realizations and all m-tuples of
// LT row supports (organized as a distribution over row-space subspaces) the
// probability that the product matrix reaches full rank. Throws BudgetError
// when (2^n - 1)^m * 2^(k(n-k)) exceeds ~1e8 weighted terms.
double exact_small(const RaptorConfig& cfg, int m);
double exact_small_budget(const RaptorConfig& cfg, int m);

std::vector<SweepRecord> sweep(const RaptorConfig& cfg, int m_first, int m_last,
                               long long trials, std::uint64_t seed, bool with_bounds = true,
                               int workers = 1);

// P_suc(T) per transmitted-count T. For CurveSource::mc, Pr(A_m^k) is
// estimated once per m and then mixed analytically; for ideal the curve is 1
// for m >= k.
std::vector<BecPoint> bec_experiment(const RaptorConfig& cfg, double p,
                                     const std::vector<int>& t_values, long long trials,
                                     std::uint64_t seed, CurveSource source, int workers = 1);

// Smallest T with P_suc >= target, or nullopt if none in the list reaches it.
std::optional<int> min_t_reaching(const std::vector<BecPoint>& points, double target,
                                  bool ideal_curve = false);

enum class PersistFormat { csv, jsonl };
void persist(const std::vector<SweepRecord>& records, const std::string& path,
             PersistFormat format);
std::vector<SweepRecord> load_records(const std::string& path, PersistFormat format);

// Schema helpers shared by persist() and the CLI.
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& r);
std::string format_double17(double v);

} // namespace raptor
