// Command-line front end: analytical bounds, Monte Carlo sweeps, exact
// enumeration at desk scale, BEC experiments, and degree-distribution
// comparisons, all emitting plot-ready CSV/JSONL.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "raptor/bounds.hpp"
#include "raptor/simulate.hpp"

namespace {

using raptor::BoundPoint;
using raptor::BoundTables;
using raptor::CurveSource;
using raptor::DegreeDistribution;
using raptor::PersistFormat;
using raptor::RaptorConfig;
using raptor::SweepRecord;

struct Options {
    int k = 0;
    int n = 0;
    double eta = 0.7;
    std::vector<std::string> omegas;
    std::string m_range;
    std::string gamma_range;
    std::string t_range;
    long long trials = 100000;
    std::uint64_t seed = 42;
    int threads = 1;
    double p = -1.0;
    double target = 0.95;
    std::string curve = "mc";
    std::string out;
    std::string format = "csv";
    std::string config_path;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_int_range(const std::string& text, const std::string& flag) {
    int a = 0, b = 0, step = 1;
    char extra = 0;
    const int got3 = std::sscanf(text.c_str(), "%d:%d:%d%c", &a, &b, &step, &extra);
    if (got3 == 3) {
    } else if (std::sscanf(text.c_str(), "%d:%d%c", &a, &b, &extra) == 2) {
        step = 1;
    } else if (std::sscanf(text.c_str(), "%d%c", &a, &extra) == 1) {
        b = a;
    } else {
        throw UsageError(flag + ": expected a:b[:step], got \"" + text + "\"");
    }
    if (step < 1 || b < a)
        throw UsageError(flag + ": range must be ascending with step >= 1");
    std::vector<int> values;
    for (int v = a; v <= b; v += step)
        values.push_back(v);
    return values;
}

std::vector<int> parse_gamma_range(const std::string& text, int k) {
    double a = 0, b = 0, step = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &a, &b, &step, &extra) == 3) {
    } else if (std::sscanf(text.c_str(), "%lf:%lf%c", &a, &b, &extra) == 2) {
        step = 1.0 / k;
    } else if (std::sscanf(text.c_str(), "%lf%c", &a, &extra) == 1) {
        b = a;
        step = 1.0;
    } else {
        throw UsageError("--gamma: expected x:y[:step], got \"" + text + "\"");
    }
    if (step <= 0.0 || b < a - 1e-12)
        throw UsageError("--gamma: range must be ascending with step > 0");
    std::vector<int> values;
    for (double g = a; g <= b + 1e-12; g += step) {
        const int m = static_cast<int>(std::floor(g * k + 0.5)); // round half up
        if (values.empty() || values.back() != m)
            values.push_back(m);
    }
    return values;
}

DegreeDistribution make_omega(const std::string& selector, int n) {
    if (selector == "ideal")
        return DegreeDistribution::ideal_soliton(n);
    if (selector == "binomial")
        return DegreeDistribution::binomial(n);
    if (selector == "3gpp")
        return DegreeDistribution::standard_3gpp(n);
    if (selector == "robust")
        return DegreeDistribution::robust_soliton(n, 0.04, 0.01);
    if (selector.rfind("robust:", 0) == 0) {
        double c = 0, delta = 0;
        char extra = 0;
        if (std::sscanf(selector.c_str(), "robust:%lf:%lf%c", &c, &delta, &extra) != 2)
            throw UsageError("--omega: expected robust:c:delta, got \"" + selector + "\"");
        return DegreeDistribution::robust_soliton(n, c, delta);
    }
    if (selector.rfind("file:", 0) == 0) {
        DegreeDistribution d = DegreeDistribution::from_file(selector.substr(5));
        if (d.support() > n)
            throw UsageError("--omega: table degree " + std::to_string(d.support()) +
                             " exceeds n=" + std::to_string(n));
        if (d.support() == n)
            return d;
        // re-embed on support 1..n with a zero tail
        std::vector<std::pair<int, double>> entries;
        for (int deg = 1; deg <= d.support(); ++deg)
            if (d.pmf(deg) > 0.0)
                entries.emplace_back(deg, d.pmf(deg));
        entries.emplace_back(n, 0.0);
        return DegreeDistribution::from_table(entries, d.name());
    }
    throw UsageError("--omega: unknown selector \"" + selector +
                     "\" (ideal|binomial|3gpp|robust[:c:delta]|file:PATH)");
}

RaptorConfig make_config(const Options& opt, const std::string& omega_selector) {
    if (opt.k < 1)
        throw UsageError("--k: must be >= 1");
    if (opt.n < opt.k)
        throw UsageError("--n: must be >= k");
    if (opt.eta < 0.0 || opt.eta > 1.0)
        throw UsageError("--eta: must be in [0,1]");
    return RaptorConfig(opt.k, opt.n, opt.eta, make_omega(omega_selector, opt.n));
}

std::vector<int> m_values(const Options& opt, const std::string& what = "--m") {
    if (!opt.m_range.empty() && !opt.gamma_range.empty())
        throw UsageError("--m and --gamma are mutually exclusive");
    if (!opt.m_range.empty())
        return parse_int_range(opt.m_range, what);
    if (!opt.gamma_range.empty())
        return parse_gamma_range(opt.gamma_range, opt.k);
    throw UsageError(what + ": a range is required");
}

PersistFormat parse_format(const std::string& fmt) {
    if (fmt == "csv")
        return PersistFormat::csv;
    if (fmt == "jsonl")
        return PersistFormat::jsonl;
    throw UsageError("--format: expected csv or jsonl");
}

std::string resolve_out(const Options& opt, const std::string& default_stem) {
    std::string path = opt.out;
    if (path.empty())
        path = default_stem + (opt.format == "jsonl" ? ".jsonl" : ".csv");
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("RAPTOR_OUT_DIR"))
            p = std::filesystem::path(dir) / p;
    }
    return p.string();
}

void add_code_options(CLI::App* cmd, Options& opt, bool multi_omega = false) {
    cmd->add_option("--k", opt.k, "source packet count")->required();
    cmd->add_option("--n", opt.n, "intermediate packet count (>= k)")->required();
    cmd->add_option("--eta", opt.eta, "pre-code Bernoulli parameter")->capture_default_str();
    auto* om = cmd->add_option("--omega", opt.omegas,
                               "degree distribution: ideal|binomial|3gpp|robust[:c:delta]|file:PATH");
    om->required();
    if (!multi_omega)
        om->expected(1);
    cmd->add_option("--config", opt.config_path,
                    "key=value file mirroring the flags (flags win)");
}

// Layers a plain key=value config file under the explicit flags: every
// "key=value" line becomes "--key value" unless --key already appears on the
// command line. Applied before CLI11 sees the arguments.
std::vector<std::string> layer_config_file(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty())
        return args;
    std::ifstream in(path);
    if (!in)
        throw UsageError("--config: cannot open " + path);
    std::vector<std::string> out = args;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            continue;
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0)
                given = true;
        if (!given) {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    return out;
}

void add_mc_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials per point")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "deterministic base seed")->capture_default_str();
    cmd->add_option("--threads,--workers", opt.threads, "worker threads")->capture_default_str();
}

void add_out_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--out", opt.out, "output path (default derived; see RAPTOR_OUT_DIR)");
    cmd->add_option("--format", opt.format, "csv or jsonl")->capture_default_str();
}

// ---------------- subcommand bodies ----------------

int run_bounds(const Options& opt) {
    const RaptorConfig cfg = make_config(opt, opt.omegas.front());
    const std::vector<int> ms = m_values(opt);
    const BoundTables tables(cfg);
    const bool binomial = opt.omegas.front() == "binomial";

    std::printf("# k=%d n=%d eta=%g omega=%s\n", cfg.k, cfg.n, cfg.eta,
                cfg.omega.name().c_str());
    std::printf("%6s %10s %22s %22s %22s %22s\n", "m", "gamma", "lower_raw", "lower",
                "upper_raw", "upper");
    double max_dev_lower = 0.0, max_dev_upper = 0.0;
    std::vector<SweepRecord> records;
    for (int m : ms) {
        const BoundPoint b = tables.evaluate(m);
        std::printf("%6d %10.5f %22.15g %22.15g %22.15g %22.15g\n", b.m, b.gamma, b.lower_raw,
                    b.lower, b.upper_raw, b.upper);
        if (binomial) {
            const double cl = raptor::corollary_lower_raw(m, cfg.k, cfg.n);
            const double cu = raptor::corollary_upper_raw(m, cfg.k, cfg.n);
            max_dev_lower = std::max(max_dev_lower, std::abs(b.lower_raw - cl) / std::abs(cl));
            max_dev_upper = std::max(max_dev_upper, std::abs(b.upper_raw - cu) / std::abs(cu));
        }
        SweepRecord rec;
        rec.k = cfg.k;
        rec.n = cfg.n;
        rec.eta = cfg.eta;
        rec.omega = cfg.omega.name();
        rec.m = m;
        rec.gamma = b.gamma;
        rec.trials = 0;
        rec.seed = opt.seed;
        rec.lower = b.lower;
        rec.upper = b.upper;
        records.push_back(std::move(rec));
    }
    if (binomial) {
        std::printf("# corollary cross-check: max rel dev lower=%.3g upper=%.3g "
                    "(closed forms: lower exact; upper strictly looser where a pair "
                    "weight index is zero)\n",
                    max_dev_lower, max_dev_upper);
    }
    if (!opt.out.empty())
        raptor::persist(records, resolve_out(opt, "bounds"), parse_format(opt.format));
    return 0;
}

int run_simulate(const Options& opt) {
    const RaptorConfig cfg = make_config(opt, opt.omegas.front());
    const std::vector<int> ms = m_values(opt);
    if (opt.trials < 1)
        throw UsageError("--trials: must be >= 1");
    std::vector<SweepRecord> records;
    const BoundTables tables(cfg);
    for (int m : ms) {
        SweepRecord rec = raptor::estimate(cfg, m, opt.trials, opt.seed, opt.threads);
        const BoundPoint b = tables.evaluate(m);
        rec.lower = b.lower;
        rec.upper = b.upper;
        records.push_back(std::move(rec));
    }
    const std::string path = resolve_out(opt, "simulate");
    raptor::persist(records, path, parse_format(opt.format));
    for (const auto& r : records)
        std::printf("m=%3d gamma=%.4f est=%.6f ci=[%.6f,%.6f] lower=%.6f upper=%.6f\n", r.m,
                    r.gamma, *r.mc_estimate, *r.ci_low, *r.ci_high, *r.lower, *r.upper);
    std::printf("wrote %zu records to %s\n", records.size(), path.c_str());
    return 0;
}

int run_exact(const Options& opt) {
    const RaptorConfig cfg = make_config(opt, opt.omegas.front());
    const std::vector<int> ms = m_values(opt);
    const BoundTables tables(cfg);
    std::vector<SweepRecord> records;
    std::printf("%6s %10s %22s %22s %22s %10s\n", "m", "gamma", "lower", "exact", "upper",
                "sandwich");
    for (int m : ms) {
        const double exact = raptor::exact_small(cfg, m);
        const BoundPoint b = tables.evaluate(m);
        const bool ok = b.lower <= exact + 1e-12 && exact <= b.upper + 1e-12;
        std::printf("%6d %10.5f %22.15g %22.15g %22.15g %10s\n", m, b.gamma, b.lower, exact,
                    b.upper, ok ? "ok" : "VIOLATED");
        SweepRecord rec;
        rec.k = cfg.k;
        rec.n = cfg.n;
        rec.eta = cfg.eta;
        rec.omega = cfg.omega.name();
        rec.m = m;
        rec.gamma = b.gamma;
        rec.trials = 0;
        rec.seed = opt.seed;
        rec.lower = b.lower;
        rec.upper = b.upper;
        rec.exact = exact;
        records.push_back(std::move(rec));
    }
    if (!opt.out.empty())
        raptor::persist(records, resolve_out(opt, "exact"), parse_format(opt.format));
    return 0;
}

CurveSource parse_curve(const std::string& s) {
    if (s == "mc")
        return CurveSource::mc;
    if (s == "lower")
        return CurveSource::lower;
    if (s == "upper")
        return CurveSource::upper;
    if (s == "ideal")
        return CurveSource::ideal;
    throw UsageError("--curve: expected mc|lower|upper|ideal");
}

int run_bec(const Options& opt) {
    const RaptorConfig cfg = make_config(opt, opt.omegas.front());
    if (opt.p < 0.0 || opt.p > 1.0)
        throw UsageError("--p: erasure probability in [0,1] is required");
    if (opt.t_range.empty())
        throw UsageError("--T: a transmission-count range is required");
    const std::vector<int> ts = parse_int_range(opt.t_range, "--T");
    const CurveSource source = parse_curve(opt.curve);
    const auto points =
        raptor::bec_experiment(cfg, opt.p, ts, opt.trials, opt.seed, source, opt.threads);

    const std::string path = resolve_out(opt, "bec");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    if (parse_format(opt.format) == PersistFormat::csv) {
        out << "k,n,eta,omega,p,curve_source,T,p_suc,p_suc_ideal\n";
        for (const auto& pt : points)
            out << cfg.k << ',' << cfg.n << ',' << raptor::format_double17(cfg.eta) << ','
                << cfg.omega.name() << ',' << raptor::format_double17(opt.p) << ','
                << opt.curve << ',' << pt.channel.t << ','
                << raptor::format_double17(pt.p_suc) << ','
                << raptor::format_double17(pt.p_suc_ideal) << '\n';
    } else {
        for (const auto& pt : points) {
            const nlohmann::json j{{"k", cfg.k},
                                   {"n", cfg.n},
                                   {"eta", cfg.eta},
                                   {"omega", cfg.omega.name()},
                                   {"p", opt.p},
                                   {"curve_source", opt.curve},
                                   {"T", pt.channel.t},
                                   {"p_suc", pt.p_suc},
                                   {"p_suc_ideal", pt.p_suc_ideal}};
            out << j.dump() << '\n';
        }
    }

    for (const auto& pt : points)
        std::printf("T=%3d p_suc=%.6f ideal=%.6f\n", pt.channel.t, pt.p_suc, pt.p_suc_ideal);
    const auto t_raptor = raptor::min_t_reaching(points, opt.target, false);
    const auto t_ideal = raptor::min_t_reaching(points, opt.target, true);
    if (t_raptor && t_ideal) {
        std::printf("target %.4f: raptor T=%d ideal T=%d ratio=%.4f\n", opt.target, *t_raptor,
                    *t_ideal, static_cast<double>(*t_raptor) / *t_ideal);
    } else {
        std::printf("target %.4f not reached within the T range (raptor %s, ideal %s)\n",
                    opt.target, t_raptor ? "reached" : "unreached",
                    t_ideal ? "reached" : "unreached");
    }
    std::printf("wrote %zu points to %s\n", points.size(), path.c_str());
    return 0;
}

int run_compare(const Options& opt) {
    if (opt.omegas.size() < 2)
        throw UsageError("--omega: compare needs at least two distributions");
    const std::vector<int> ms = m_values(opt);
    if (opt.trials < 1)
        throw UsageError("--trials: must be >= 1");
    std::vector<SweepRecord> all;
    for (const auto& selector : opt.omegas) {
        const RaptorConfig cfg = make_config(opt, selector);
        const BoundTables tables(cfg);
        for (int m : ms) {
            SweepRecord rec = raptor::estimate(cfg, m, opt.trials, opt.seed, opt.threads);
            const BoundPoint b = tables.evaluate(m);
            rec.lower = b.lower;
            rec.upper = b.upper;
            all.push_back(std::move(rec));
        }
        std::printf("omega=%-18s done (%zu points)\n",
                    all.back().omega.c_str(), ms.size());
    }
    const std::string path = resolve_out(opt, "compare");
    raptor::persist(all, path, parse_format(opt.format));
    std::printf("wrote %zu records to %s\n", all.size(), path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Raptor-code decoding-probability bounds, simulation, and BEC experiments"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* bounds = app.add_subcommand("bounds", "evaluate analytical bounds over m");
    add_code_options(bounds, opt);
    bounds->add_option("--m", opt.m_range, "m range a:b[:step]");
    bounds->add_option("--gamma", opt.gamma_range, "overhead range x:y[:step]");
    bounds->add_option("--seed", opt.seed, "seed recorded in output")->capture_default_str();
    add_out_options(bounds, opt);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo sweep over m");
    add_code_options(simulate, opt);
    simulate->add_option("--m", opt.m_range, "m range a:b[:step]");
    simulate->add_option("--gamma", opt.gamma_range, "overhead range x:y[:step]");
    add_mc_options(simulate, opt);
    add_out_options(simulate, opt);

    CLI::App* exact = app.add_subcommand("exact", "exact enumeration at desk scale");
    add_code_options(exact, opt);
    exact->add_option("--m", opt.m_range, "m range a:b[:step]");
    exact->add_option("--gamma", opt.gamma_range, "overhead range x:y[:step]");
    exact->add_option("--seed", opt.seed, "seed recorded in output")->capture_default_str();
    add_out_options(exact, opt);

    CLI::App* bec = app.add_subcommand("bec", "erasure-channel success probability vs T");
    add_code_options(bec, opt);
    bec->add_option("--p", opt.p, "erasure probability")->required();
    bec->add_option("--T", opt.t_range, "transmission count range a:b[:step]")->required();
    bec->add_option("--target", opt.target, "success target for the minimal-T report")->capture_default_str();
    bec->add_option("--curve", opt.curve, "Pr(A_m) source: mc|lower|upper|ideal")->capture_default_str();
    add_mc_options(bec, opt);
    add_out_options(bec, opt);

    CLI::App* compare = app.add_subcommand("compare", "sweep several degree distributions");
    add_code_options(compare, opt, /*multi_omega=*/true);
    compare->add_option("--m", opt.m_range, "m range a:b[:step]");
    compare->add_option("--gamma", opt.gamma_range, "overhead range x:y[:step]");
    add_mc_options(compare, opt);
    add_out_options(compare, opt);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = layer_config_file(args);
        std::reverse(args.begin(), args.end()); // CLI11 consumes back-to-front
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help and friends
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: invalid-argument: " << e.what() << "\n";
        return 1;
    }

    try {
        if (bounds->parsed())
            return run_bounds(opt);
        if (simulate->parsed())
            return run_simulate(opt);
        if (exact->parsed())
            return run_exact(opt);
        if (bec->parsed())
            return run_bec(opt);
        if (compare->parsed())
            return run_compare(opt);
    } catch (const UsageError& e) {
        std::cerr << "error: invalid-argument: " << e.what() << "\n";
        return 1;
    } catch (const raptor::BudgetError& e) {
        std::cerr << "error: budget-exceeded: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid-argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
