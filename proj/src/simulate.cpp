#include "raptor/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace raptor {

namespace {

constexpr double kWilsonZ = 1.959963984540054; // 97.5% normal quantile

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

// One decodability trial on word-packed product rows (k <= 64): draws P as
// column masks, then LT rows, inserting each product row into a GF(2) basis.
bool trial_decodable(const RaptorConfig& cfg, int m, Rng& rng) {
    const int k = cfg.k;
    const int n = cfg.n;
    // g_pre row masks over GF(2)^k: systematic rows then P columns
    std::vector<std::uint64_t> row_mask(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < k; ++i)
        row_mask[static_cast<std::size_t>(i)] = std::uint64_t{1} << i;
    for (int i = 0; i < k; ++i)
        for (int t = 0; t < n - k; ++t)
            if (rng.next_bernoulli(cfg.eta))
                row_mask[static_cast<std::size_t>(k + t)] |= std::uint64_t{1} << i;

    std::vector<std::uint64_t> basis(static_cast<std::size_t>(k), 0);
    int rank_now = 0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int row = 0; row < m; ++row) {
        const int d = cfg.omega.sample(rng);
        for (int i = 0; i < n; ++i)
            idx[static_cast<std::size_t>(i)] = i;
        std::uint64_t v = 0;
        for (int i = 0; i < d; ++i) {
            const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            v ^= row_mask[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        }
        while (v) {
            const int lead = 63 - std::countl_zero(v);
            std::uint64_t& slot = basis[static_cast<std::size_t>(lead)];
            if (slot == 0) {
                slot = v;
                if (++rank_now == k)
                    return true;
                break;
            }
            v ^= slot;
        }
    }
    return rank_now == k;
}

// Generic-path fallback mirroring the library decodable() predicate.
bool trial_decodable_generic(const RaptorConfig& cfg, int m, Rng& rng) {
    const Precode pre = gen_precode(cfg, rng);
    const BitMatrix g_lt = draw_lt_matrix(cfg, m, rng);
    return decodable(g_lt, pre);
}

} // namespace

WilsonCi wilson95(long long successes, long long trials) {
    const double t = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / t;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / t;
    const double center = (phat + z2 / (2.0 * t)) / denom;
    const double half =
        kWilsonZ * std::sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t)) / denom;
    // roundoff must not push the interval off the point estimate
    return WilsonCi{std::max(0.0, std::min(center - half, phat)),
                    std::min(1.0, std::max(center + half, phat))};
}

SweepRecord estimate(const RaptorConfig& cfg, int m, long long trials, std::uint64_t seed,
                     int workers) {
    if (trials < 1)
        throw std::invalid_argument("estimate: trials must be >= 1");
    if (workers < 1)
        workers = 1;

    const bool fast = cfg.k <= 64;
    auto run_range = [&](long long first, long long last) {
        long long hits = 0;
        for (long long t = first; t < last; ++t) {
            Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(m),
                                         static_cast<std::uint64_t>(t)});
            const bool ok = fast ? trial_decodable(cfg, m, rng)
                                 : trial_decodable_generic(cfg, m, rng);
            if (ok)
                ++hits;
        }
        return hits;
    };

    long long successes = 0;
    if (workers == 1 || trials < 2 * workers) {
        successes = run_range(0, trials);
    } else {
        std::vector<long long> partial(static_cast<std::size_t>(workers), 0);
        std::vector<std::thread> pool;
        const long long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long long first = w * chunk;
            const long long last = std::min(trials, first + chunk);
            pool.emplace_back([&, w, first, last] {
                partial[static_cast<std::size_t>(w)] = run_range(first, last);
            });
        }
        for (auto& th : pool)
            th.join();
        for (long long h : partial)
            successes += h;
    }

    SweepRecord rec;
    rec.k = cfg.k;
    rec.n = cfg.n;
    rec.eta = cfg.eta;
    rec.omega = cfg.omega.name();
    rec.m = m;
    rec.gamma = static_cast<double>(m) / cfg.k;
    rec.trials = trials;
    rec.seed = seed;
    rec.mc_estimate = static_cast<double>(successes) / static_cast<double>(trials);
    const WilsonCi ci = wilson95(successes, trials);
    rec.ci_low = ci.low;
    rec.ci_high = ci.high;
    return rec;
}

BudgetError::BudgetError(double required_terms)
    : std::runtime_error("exact_small: enumeration budget exceeded; requires ~" +
                         std::to_string(required_terms) + " weighted terms (limit 1e8)"),
      required(required_terms) {}

double exact_small_budget(const RaptorConfig& cfg, int m) {
    const double supports = std::exp2(static_cast<double>(cfg.n)) - 1.0;
    const double pre_count = std::exp2(static_cast<double>(cfg.k * (cfg.n - cfg.k)));
    return std::pow(supports, static_cast<double>(m)) * pre_count;
}

double exact_small(const RaptorConfig& cfg, int m) {
    constexpr double kBudget = 1e8;
    const double required = exact_small_budget(cfg, m);
    if (!(required <= kBudget))
        throw BudgetError(required);
    if (m == 0)
        return 0.0; // no rows, rank 0 < k

    const int k = cfg.k;
    const int n = cfg.n;
    const int pre_bits = k * (n - k);
    const std::uint32_t n_supports = (std::uint32_t{1} << n) - 1;

    // support probabilities: Omega_d / C(n,d), indexed by popcount
    std::vector<double> weight_prob(static_cast<std::size_t>(n) + 1, 0.0);
    for (int d = 1; d <= n; ++d) {
        double c = 1.0;
        for (int j = 1; j <= d; ++j)
            c = c * (n - d + j) / j;
        weight_prob[static_cast<std::size_t>(d)] = cfg.omega.pmf(d) / c;
    }

    double total = 0.0;
    std::vector<std::uint64_t> row_mask(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> product(static_cast<std::size_t>(n_supports) + 1);
    for (std::uint64_t pmask = 0; pmask < (std::uint64_t{1} << pre_bits); ++pmask) {
        const int ones = std::popcount(pmask);
        const double w_pre = powi(cfg.eta, ones) * powi(1.0 - cfg.eta, pre_bits - ones);
        if (w_pre == 0.0)
            continue;

        for (int i = 0; i < k; ++i)
            row_mask[static_cast<std::size_t>(i)] = std::uint64_t{1} << i;
        for (int t = 0; t < n - k; ++t) {
            std::uint64_t col = 0;
            for (int i = 0; i < k; ++i)
                if ((pmask >> (static_cast<std::uint64_t>(i) * (n - k) + t)) & 1u)
                    col |= std::uint64_t{1} << i;
            row_mask[static_cast<std::size_t>(k + t)] = col;
        }

        // product row of every support via subset DP
        product[0] = 0;
        for (std::uint32_t s = 1; s <= n_supports; ++s) {
            const int low = std::countr_zero(s);
            product[s] = product[s & (s - 1)] ^ row_mask[static_cast<std::size_t>(low)];
        }

        // distribution over row-space subspaces after each received row;
        // a subspace is keyed by its reduced-echelon basis (canonical form)
        using Basis = std::vector<std::uint64_t>;
        std::map<Basis, double> dist;
        dist.emplace(Basis{}, 1.0);
        for (int step = 0; step < m; ++step) {
            std::map<Basis, double> next;
            for (const auto& [basis, prob] : dist) {
                for (std::uint32_t s = 1; s <= n_supports; ++s) {
                    const double ps =
                        weight_prob[static_cast<std::size_t>(std::popcount(s))];
                    std::uint64_t v = product[s];
                    for (std::uint64_t b : basis) // descending leading bits
                        v = std::min(v, v ^ b);
                    if (v == 0) {
                        next[basis] += ps * prob;
                        continue;
                    }
                    Basis nb = basis;
                    for (std::uint64_t& b : nb)
                        b = std::min(b, b ^ v);
                    nb.push_back(v);
                    std::sort(nb.begin(), nb.end(), std::greater<>());
                    next[std::move(nb)] += ps * prob;
                }
            }
            dist = std::move(next);
        }
        double success = 0.0;
        for (const auto& [basis, prob] : dist)
            if (static_cast<int>(basis.size()) == k)
                success += prob;
        total += w_pre * success;
    }
    return std::min(1.0, std::max(0.0, total));
}

std::vector<SweepRecord> sweep(const RaptorConfig& cfg, int m_first, int m_last,
                               long long trials, std::uint64_t seed, bool with_bounds,
                               int workers) {
    if (m_first > m_last)
        throw std::invalid_argument("sweep: empty m range");
    std::optional<BoundTables> tables;
    if (with_bounds)
        tables.emplace(cfg);
    std::vector<SweepRecord> records;
    records.reserve(static_cast<std::size_t>(m_last - m_first + 1));
    for (int m = m_first; m <= m_last; ++m) {
        SweepRecord rec = estimate(cfg, m, trials, seed, workers);
        if (tables) {
            const BoundPoint b = tables->evaluate(m);
            rec.lower = b.lower;
            rec.upper = b.upper;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<BecPoint> bec_experiment(const RaptorConfig& cfg, double p,
                                     const std::vector<int>& t_values, long long trials,
                                     std::uint64_t seed, CurveSource source, int workers) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("bec_experiment: p outside [0,1]");
    if (t_values.empty())
        throw std::invalid_argument("bec_experiment: empty T range");
    const int t_max = *std::max_element(t_values.begin(), t_values.end());

    // Pr(A_m^k) for m = k..t_max, from the requested source
    std::vector<double> curve(static_cast<std::size_t>(std::max(0, t_max - cfg.k + 1)), 1.0);
    if (source == CurveSource::mc) {
        for (int m = cfg.k; m <= t_max; ++m)
            curve[static_cast<std::size_t>(m - cfg.k)] =
                *estimate(cfg, m, trials, seed, workers).mc_estimate;
    } else if (source == CurveSource::lower || source == CurveSource::upper) {
        const BoundTables tables(cfg);
        for (int m = cfg.k; m <= t_max; ++m) {
            const BoundPoint b = tables.evaluate(m);
            curve[static_cast<std::size_t>(m - cfg.k)] =
                source == CurveSource::lower ? b.lower : b.upper;
        }
    }

    const auto curve_fn = [&](int m) { return curve[static_cast<std::size_t>(m - cfg.k)]; };
    const auto one_fn = [](int) { return 1.0; };
    std::vector<BecPoint> points;
    points.reserve(t_values.size());
    for (int t : t_values) {
        BecPoint pt;
        pt.channel = ChannelBec{p, t};
        pt.p_suc = bec_success(t, p, curve_fn, cfg.k);
        pt.p_suc_ideal = bec_success(t, p, one_fn, cfg.k);
        points.push_back(pt);
    }
    return points;
}

std::optional<int> min_t_reaching(const std::vector<BecPoint>& points, double target,
                                  bool ideal_curve) {
    for (const auto& pt : points)
        if ((ideal_curve ? pt.p_suc_ideal : pt.p_suc) >= target)
            return pt.channel.t;
    return std::nullopt;
}

std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double17(*v) : std::string();
}

} // namespace

std::string sweep_csv_header() {
    return "k,n,eta,omega,m,gamma,trials,seed,mc_estimate,ci_low,ci_high,lower,upper,exact";
}

std::string sweep_csv_row(const SweepRecord& r) {
    std::ostringstream out;
    out << r.k << ',' << r.n << ',' << format_double17(r.eta) << ',' << csv_escape(r.omega)
        << ',' << r.m << ',' << format_double17(r.gamma) << ',' << r.trials << ',' << r.seed
        << ',' << opt_field(r.mc_estimate) << ',' << opt_field(r.ci_low) << ','
        << opt_field(r.ci_high) << ',' << opt_field(r.lower) << ','
        << opt_field(r.upper) << ',' << opt_field(r.exact);
    return out.str();
}

void persist(const std::vector<SweepRecord>& records, const std::string& path,
             PersistFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("persist: cannot open " + path + " for writing");
    if (format == PersistFormat::csv) {
        out << sweep_csv_header() << '\n';
        for (const auto& r : records)
            out << sweep_csv_row(r) << '\n';
    } else {
        for (const auto& r : records) {
            nlohmann::json j{{"k", r.k},
                             {"n", r.n},
                             {"eta", r.eta},
                             {"omega", r.omega},
                             {"m", r.m},
                             {"gamma", r.gamma},
                             {"trials", r.trials},
                             {"seed", r.seed},
                             {"mc_estimate",
                              r.mc_estimate ? nlohmann::json(*r.mc_estimate) : nlohmann::json()},
                             {"ci_low", r.ci_low ? nlohmann::json(*r.ci_low) : nlohmann::json()},
                             {"ci_high", r.ci_high ? nlohmann::json(*r.ci_high) : nlohmann::json()},
                             {"lower", r.lower ? nlohmann::json(*r.lower) : nlohmann::json()},
                             {"upper", r.upper ? nlohmann::json(*r.upper) : nlohmann::json()},
                             {"exact", r.exact ? nlohmann::json(*r.exact) : nlohmann::json()}};
            out << j.dump() << '\n';
        }
    }
    if (!out)
        throw std::runtime_error("persist: write failed for " + path);
}

std::vector<SweepRecord> load_records(const std::string& path, PersistFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_records: cannot open " + path);
    std::vector<SweepRecord> records;
    std::string line;
    if (format == PersistFormat::csv) {
        if (!std::getline(in, line) || line != sweep_csv_header())
            throw std::runtime_error("load_records: bad CSV header in " + path);
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            const auto f = csv_split(line);
            if (f.size() != 14)
                throw std::runtime_error("load_records: bad CSV row in " + path);
            SweepRecord r;
            r.k = std::stoi(f[0]);
            r.n = std::stoi(f[1]);
            r.eta = std::stod(f[2]);
            r.omega = f[3];
            r.m = std::stoi(f[4]);
            r.gamma = std::stod(f[5]);
            r.trials = std::stoll(f[6]);
            r.seed = std::stoull(f[7]);
            if (!f[8].empty())
                r.mc_estimate = std::stod(f[8]);
            if (!f[9].empty())
                r.ci_low = std::stod(f[9]);
            if (!f[10].empty())
                r.ci_high = std::stod(f[10]);
            if (!f[11].empty())
                r.lower = std::stod(f[11]);
            if (!f[12].empty())
                r.upper = std::stod(f[12]);
            if (!f[13].empty())
                r.exact = std::stod(f[13]);
            records.push_back(std::move(r));
        }
    } else {
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            const auto j = nlohmann::json::parse(line);
            SweepRecord r;
            r.k = j.at("k").get<int>();
            r.n = j.at("n").get<int>();
            r.eta = j.at("eta").get<double>();
            r.omega = j.at("omega").get<std::string>();
            r.m = j.at("m").get<int>();
            r.gamma = j.at("gamma").get<double>();
            r.trials = j.at("trials").get<long long>();
            r.seed = j.at("seed").get<std::uint64_t>();
            if (!j.at("mc_estimate").is_null())
                r.mc_estimate = j.at("mc_estimate").get<double>();
            if (!j.at("ci_low").is_null())
                r.ci_low = j.at("ci_low").get<double>();
            if (!j.at("ci_high").is_null())
                r.ci_high = j.at("ci_high").get<double>();
            if (!j.at("lower").is_null())
                r.lower = j.at("lower").get<double>();
            if (!j.at("upper").is_null())
                r.upper = j.at("upper").get<double>();
            if (!j.at("exact").is_null())
                r.exact = j.at("exact").get<double>();
            records.push_back(std::move(r));
        }
    }
    return records;
}

} // namespace raptor
