// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the full verification matrix end to end: exact sandwich,
// closed-form collapse, figure-scale Monte Carlo agreement and ordering,
// BEC minimal-T ratios, rank-criterion equivalence, codec round trips, CSV
// determinism, and numeric hygiene of the bound tables.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "raptor/simulate.hpp"

using raptor::BoundTables;
using raptor::DegreeDistribution;
using raptor::RaptorConfig;
using raptor::Rng;

namespace {

int g_failed = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass)
        ++g_failed;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

DegreeDistribution make_dist(const std::string& name, int n) {
    if (name == "ideal")
        return DegreeDistribution::ideal_soliton(n);
    if (name == "binomial")
        return DegreeDistribution::binomial(n);
    if (name == "robust")
        return DegreeDistribution::robust_soliton(n, 0.04, 0.01);
    if (name == "3gpp")
        return DegreeDistribution::standard_3gpp(n);
    if (name == "pm1")
        return DegreeDistribution::point_mass(n, 1);
    std::abort();
}

// Wilson-implied standard error: the 95% interval half-width rescaled by z.
double sigma_wilson(const raptor::SweepRecord& rec) {
    return (*rec.ci_high - *rec.ci_low) / (2.0 * 1.959963984540054);
}

// 1. Exact sandwich: clamped lower <= exact <= clamped upper on the full
//    tiny-instance grid, comparison tolerance 1e-12, under 10 s.
void criterion1() {
    Timer timer;
    const double tol = 1e-12;
    int checked = 0;
    bool ok = true;
    std::string worst;
    for (double eta : {0.3, 0.5, 0.7})
        for (const char* omega : {"ideal", "binomial", "pm1"}) {
            const RaptorConfig cfg(2, 3, eta, make_dist(omega, 3));
            const BoundTables tables(cfg);
            for (int m = 2; m <= 8; ++m) {
                const double exact = raptor::exact_small(cfg, m);
                const auto b = tables.evaluate(m);
                ++checked;
                if (!(b.lower <= exact + tol && exact <= b.upper + tol)) {
                    ok = false;
                    std::ostringstream w;
                    w << " VIOLATED at eta=" << eta << " omega=" << omega << " m=" << m;
                    worst = w.str();
                }
            }
        }
    const double secs = timer.elapsed();
    const bool in_time = secs < 10.0;
    std::ostringstream d;
    d << "exact sandwich on " << checked << " tiny instances" << worst
      << (in_time ? "" : " [over 10 s budget]");
    report(1, ok && in_time, d.str(), secs);
}

// 2. Corollary collapse under binomial omega at 1e-9 relative, under 30 s.
void criterion2() {
    Timer timer;
    double worst_lower = 0.0, worst_upper = 0.0;
    for (int k : {2, 4, 8, 10}) {
        const int n = k + 1;
        for (double eta : {0.3, 0.7}) {
            const RaptorConfig cfg(k, n, eta, DegreeDistribution::binomial(n));
            const BoundTables tables(cfg);
            for (int m = k; m <= 4 * k; ++m) {
                const double cl = raptor::corollary_lower_raw(m, k, n);
                const double cu = raptor::corollary_upper_raw(m, k, n);
                worst_lower =
                    std::max(worst_lower, std::abs(tables.lower_raw(m) - cl) / std::abs(cl));
                worst_upper =
                    std::max(worst_upper, std::abs(tables.upper_raw(m) - cu) / std::abs(cu));
            }
        }
    }
    const double secs = timer.elapsed();
    const bool lower_ok = worst_lower <= 1e-9;
    const bool upper_ok = worst_upper <= 1e-9;
    std::ostringstream d;
    d << "corollary collapse: max rel dev lower=" << worst_lower << " (<=1e-9: "
      << (lower_ok ? "yes" : "NO") << "), upper=" << worst_upper << " (<=1e-9: "
      << (upper_ok ? "yes" : "NO") << ")";
    if (!upper_ok)
        d << "; the closed-form upper bound is provably looser than the "
             "quintuple-sum evaluation wherever a pair weight index is zero, "
             "so this equality cannot hold at small k";
    report(2, lower_ok && upper_ok && secs < 30.0, d.str(), secs);
}

// 3. Figure-scale agreement: the MC estimate stays inside
//    [lower - 3 sigma_W, upper + 3 sigma_W] for every m.
void criterion3() {
    Timer timer;
    bool ok = true;
    std::string worst;
    for (double eta : {0.3, 0.7}) {
        const RaptorConfig cfg(20, 21, eta, DegreeDistribution::ideal_soliton(21));
        const BoundTables tables(cfg);
        for (int m = 20; m <= 50; ++m) {
            const auto rec = raptor::estimate(cfg, m, 100000, 42);
            const auto b = tables.evaluate(m);
            const double margin = 3.0 * sigma_wilson(rec);
            if (!(*rec.mc_estimate >= b.lower - margin &&
                  *rec.mc_estimate <= b.upper + margin)) {
                ok = false;
                std::ostringstream w;
                w << " out-of-band at eta=" << eta << " m=" << m << " est=" << *rec.mc_estimate
                  << " band=[" << b.lower - margin << "," << b.upper + margin << "]";
                worst = w.str();
            }
        }
    }
    report(3, ok, "MC (1e5 trials) within [lower-3sw, upper+3sw] for k=20 ideal soliton, "
                  "m=20..50, both etas" + worst,
           timer.elapsed());
}

// 4. Degree-distribution ordering: binomial dominates ideal/robust/3gpp up to
//    combined CI half-widths at every m in 22..50.
void criterion4() {
    Timer timer;
    const int k = 20, n = 21;
    const double eta = 0.7;
    bool ok = true;
    std::string worst;
    std::vector<raptor::SweepRecord> binom;
    {
        const RaptorConfig cfg(k, n, eta, DegreeDistribution::binomial(n));
        for (int m = 22; m <= 50; ++m)
            binom.push_back(raptor::estimate(cfg, m, 100000, 42));
    }
    for (const char* other : {"ideal", "robust", "3gpp"}) {
        const RaptorConfig cfg(k, n, eta, make_dist(other, n));
        for (int m = 22; m <= 50; ++m) {
            const auto rec = raptor::estimate(cfg, m, 100000, 42);
            const auto& b = binom[static_cast<std::size_t>(m - 22)];
            const double slack = (*b.ci_high - *b.ci_low) / 2.0 + (*rec.ci_high - *rec.ci_low) / 2.0;
            if (!(*b.mc_estimate >= *rec.mc_estimate - slack)) {
                ok = false;
                std::ostringstream w;
                w << " violated vs " << other << " at m=" << m << " (" << *b.mc_estimate
                  << " < " << *rec.mc_estimate << " - " << slack << ")";
                worst = w.str();
            }
        }
    }
    report(4, ok,
           "binomial >= {ideal, robust(0.04,0.01), 3gpp} - combined CI half-widths, "
           "m=22..50, 1e5 trials" + worst,
           timer.elapsed());
}

// 5. BEC minimal-T ratios vs the ideal fountain at target 0.95:
//    1.16 +/- 0.08 at p=0.1 and 1.11 +/- 0.08 at p=0.3.
void criterion5() {
    Timer timer;
    const int k = 20, n = 21, t_max = 60;
    const RaptorConfig cfg(k, n, 0.7, DegreeDistribution::binomial(n));
    std::vector<double> curve;
    for (int m = k; m <= t_max; ++m)
        curve.push_back(*raptor::estimate(cfg, m, 100000, 42).mc_estimate);
    const auto curve_fn = [&](int m) { return curve[static_cast<std::size_t>(m - k)]; };
    const auto one_fn = [](int) { return 1.0; };

    bool ok = true;
    std::ostringstream d;
    d << "minimal-T ratio raptor/ideal at target 0.95:";
    const double expected[2] = {1.16, 1.11};
    const double ps[2] = {0.1, 0.3};
    for (int i = 0; i < 2; ++i) {
        int t_raptor = -1, t_ideal = -1;
        for (int t = k; t <= t_max; ++t) {
            if (t_raptor < 0 && raptor::bec_success(t, ps[i], curve_fn, k) >= 0.95)
                t_raptor = t;
            if (t_ideal < 0 && raptor::bec_success(t, ps[i], one_fn, k) >= 0.95)
                t_ideal = t;
        }
        if (t_raptor < 0 || t_ideal < 0) {
            ok = false;
            d << " p=" << ps[i] << ": target unreached in T<=" << t_max;
            continue;
        }
        const double ratio = static_cast<double>(t_raptor) / t_ideal;
        const bool in_band = std::abs(ratio - expected[i]) <= 0.08;
        ok = ok && in_band;
        d << " p=" << ps[i] << ": " << t_raptor << "/" << t_ideal << "=" << ratio
          << (in_band ? " ok" : " OUT OF BAND");
    }
    report(5, ok, d.str(), timer.elapsed());
}

// 6. The two decodability rank criteria agree on 1e4 random instances.
void criterion6() {
    Timer timer;
    Rng rng(20210);
    const double etas[4] = {0.0, 0.3, 0.5, 1.0};
    int agreements = 0;
    const int total = 10000;
    for (int rep = 0; rep < total; ++rep) {
        const int k = 1 + static_cast<int>(rng.next_below(6));
        const int n = k + static_cast<int>(rng.next_below(5));
        const double eta = etas[rng.next_below(4)];
        const int m = std::max(0, k - 1 + static_cast<int>(rng.next_below(
                                           static_cast<std::uint64_t>(k + 2))));
        const RaptorConfig cfg(k, n, eta, DegreeDistribution::ideal_soliton(n));
        const auto pre = gen_precode(cfg, rng);
        const auto g_lt = draw_lt_matrix(cfg, m, rng);
        const bool via_product = rank(mul(g_lt, pre.g_pre)) == k;
        const bool via_stack = rank(stack(g_lt, pre.h)) == n;
        if (via_product == via_stack)
            ++agreements;
    }
    std::ostringstream d;
    d << "product-rank and stacked-rank decodability criteria agree on " << agreements
      << "/" << total << " random instances";
    report(6, agreements == total, d.str(), timer.elapsed());
}

// 7. Codec round trip: 1e3 encode/decode cycles at k=20, n=21, L=64, m=40.
void criterion7() {
    Timer timer;
    const RaptorConfig cfg(20, 21, 0.7, DegreeDistribution::ideal_soliton(21));
    int decoded = 0, failures = 0, inconsistent = 0, mismatches = 0, orphaned = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        Rng rng = Rng::stream(777, {static_cast<std::uint64_t>(rep)});
        const auto pre = gen_precode(cfg, rng);
        const auto source = raptor::BitMatrix::random_bernoulli(20, 64, 0.5, rng);
        const auto block = encode(cfg, pre, source, 40, rng);
        const auto res = decode(block, pre);
        switch (res.status) {
        case raptor::DecodeResult::Status::decoded:
            ++decoded;
            if (!(res.source == source))
                ++mismatches;
            if (!decodable(block.g_lt, pre))
                ++orphaned;
            break;
        case raptor::DecodeResult::Status::rank_deficient:
            ++failures;
            if (decodable(block.g_lt, pre))
                ++orphaned;
            break;
        case raptor::DecodeResult::Status::inconsistent:
            ++inconsistent;
            break;
        }
    }
    std::ostringstream d;
    d << "1000 cycles: " << decoded << " decoded (" << mismatches << " mismatches), "
      << failures << " rank failures (" << orphaned << " disagree with decodable), "
      << inconsistent << " inconsistent";
    report(7, mismatches == 0 && orphaned == 0 && inconsistent == 0, d.str(), timer.elapsed());
}

// 8. Simulate CSV is byte-identical for 1 and N workers.
void criterion8() {
    Timer timer;
    const std::string base = std::string(RAPTOR_CLI_PATH) +
                             " simulate --k 20 --n 21 --eta 0.7 --omega ideal --m 20:30 "
                             "--trials 20000 --seed 42";
    const int s1 = std::system((base + " --threads 1 --out /tmp/raptor_acc_w1.csv "
                                       ">/dev/null 2>&1").c_str());
    const int s2 = std::system((base + " --threads 4 --out /tmp/raptor_acc_w4.csv "
                                       ">/dev/null 2>&1").c_str());
    auto slurp = [](const char* path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp("/tmp/raptor_acc_w1.csv");
    const std::string b = slurp("/tmp/raptor_acc_w4.csv");
    const bool ok = WIFEXITED(s1) && WEXITSTATUS(s1) == 0 && WIFEXITED(s2) &&
                    WEXITSTATUS(s2) == 0 && !a.empty() && a == b;
    std::remove("/tmp/raptor_acc_w1.csv");
    std::remove("/tmp/raptor_acc_w4.csv");
    report(8, ok, "simulate CSV byte-identical for 1 vs 4 workers", timer.elapsed());
}

// 9. Numeric hygiene of the bound tables at k=40, n=41.
void criterion9() {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (double eta : {0.3, 0.7}) {
        for (int i = 1; i <= 40; ++i) {
            double sum = 0.0;
            for (int r = i; r <= 41 - 40 + i; ++r)
                sum += raptor::d_of_ir(i, r, 40, 41, eta);
            if (std::abs(sum - 1.0) > 1e-10) {
                ok = false;
                detail = " D row sum off at i=" + std::to_string(i);
            }
        }
    }
    for (const char* omega : {"ideal", "binomial", "robust", "3gpp"}) {
        const auto dist = make_dist(omega, 41);
        for (int r = 0; r <= 41; ++r) {
            const double j = raptor::j_of_r(r, 41, dist);
            if (j < 0.0 || j > 1.0) {
                ok = false;
                detail = std::string(" J out of range for ") + omega;
            }
        }
    }
    report(9, ok, "sum_r D(i,r) = 1 +/- 1e-10 at k=40 n=41; J in [0,1] at n=41 for all "
                  "four distributions" + detail,
           timer.elapsed());
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (g_failed == 0)
        std::puts("acceptance: all criteria passed");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failed);
    return g_failed;
}
