#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "raptor/degree.hpp"

using raptor::DegreeDistribution;
using raptor::Rng;

namespace {

double pmf_sum(const DegreeDistribution& d) {
    double s = 0.0;
    for (int i = 1; i <= d.support(); ++i)
        s += d.pmf(i);
    return s;
}

} // namespace

TEST_CASE("ideal soliton: closed-form values") {
    const auto d2 = DegreeDistribution::ideal_soliton(2);
    CHECK(d2.pmf(1) == doctest::Approx(0.5));
    CHECK(d2.pmf(2) == doctest::Approx(0.5));

    const auto d4 = DegreeDistribution::ideal_soliton(4);
    CHECK(d4.pmf(1) == doctest::Approx(0.25));
    CHECK(d4.pmf(2) == doctest::Approx(0.5));
    CHECK(d4.pmf(3) == doctest::Approx(1.0 / 6.0));
    CHECK(d4.pmf(4) == doctest::Approx(1.0 / 12.0));

    for (int n : {1, 2, 3, 7, 21, 64})
        CHECK(pmf_sum(DegreeDistribution::ideal_soliton(n)) == doctest::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(DegreeDistribution::ideal_soliton(0), std::invalid_argument);
}

TEST_CASE("robust soliton: normalization and spike handling") {
    const auto d = DegreeDistribution::robust_soliton(10, 0.04, 0.01);
    CHECK(pmf_sum(d) == doctest::Approx(1.0).epsilon(1e-13));
    // n/R = 11.44... here, so the spike clamps from 11 to n = 10
    CHECK(d.spike_clamped());

    const auto d21 = DegreeDistribution::robust_soliton(21, 0.04, 0.01);
    CHECK_FALSE(d21.spike_clamped());
    CHECK(pmf_sum(d21) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("robust soliton: n=10, c=0.04, delta=0.01 matches the Luby-formula table") {
    // Frozen from an independent high-precision evaluation of rho/tau/beta:
    // R = 0.04*ln(10/0.01)*sqrt(10) = 0.8737696080254163, spike clamps to 10,
    // beta = 1.637781903159127.
    const double expected[11] = {0.0,
                                 0.1144089823199958,
                                 0.33196634994717367,
                                 0.11954724856212474,
                                 0.06421952357092914,
                                 0.04119925371647754,
                                 0.029244528860265066,
                                 0.02215920612586555,
                                 0.017572097299370613,
                                 0.014408170003377161,
                                 0.24527463959442083};
    const auto d = DegreeDistribution::robust_soliton(10, 0.04, 0.01);
    for (int deg = 1; deg <= 10; ++deg)
        CHECK(d.pmf(deg) == doctest::Approx(expected[deg]).epsilon(1e-12));
}

TEST_CASE("robust soliton: c -> 0 limit degenerates to the ideal soliton") {
    const auto tiny = DegreeDistribution::robust_soliton(10, 1e-12, 0.01);
    CHECK(tiny.spike_clamped());
    const auto ideal = DegreeDistribution::ideal_soliton(10);
    for (int deg = 1; deg <= 10; ++deg)
        CHECK(tiny.pmf(deg) == doctest::Approx(ideal.pmf(deg)).epsilon(1e-9));
}

TEST_CASE("robust soliton: rejects bad parameters") {
    CHECK_THROWS_AS(DegreeDistribution::robust_soliton(1, 0.04, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution::robust_soliton(10, 0.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution::robust_soliton(10, 0.04, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution::robust_soliton(10, 0.04, 1.0), std::invalid_argument);
}

TEST_CASE("3gpp: printed coefficients, absent terms, support rule") {
    const auto d = DegreeDistribution::standard_3gpp(11);
    CHECK(d.pmf(1) == doctest::Approx(0.0099));
    CHECK(d.pmf(2) == doctest::Approx(0.4663));
    CHECK(d.pmf(3) == doctest::Approx(0.2144));
    CHECK(d.pmf(4) == doctest::Approx(0.1152));
    CHECK(d.pmf(10) == doctest::Approx(0.1131));
    CHECK(d.pmf(11) == doctest::Approx(0.0811));
    CHECK(d.pmf(5) == 0.0);
    CHECK(pmf_sum(d) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(DegreeDistribution::standard_3gpp(21).support() == 21);
    CHECK_THROWS_AS(DegreeDistribution::standard_3gpp(10), std::invalid_argument);
}

TEST_CASE("binomial: closed-form values and exact normalization") {
    const auto d2 = DegreeDistribution::binomial(2);
    CHECK(d2.pmf(1) == doctest::Approx(2.0 / 3.0));
    CHECK(d2.pmf(2) == doctest::Approx(1.0 / 3.0));

    const auto d4 = DegreeDistribution::binomial(4);
    CHECK(d4.pmf(1) == doctest::Approx(4.0 / 15.0));
    CHECK(d4.pmf(2) == doctest::Approx(6.0 / 15.0));
    CHECK(d4.pmf(3) == doctest::Approx(4.0 / 15.0));
    CHECK(d4.pmf(4) == doctest::Approx(1.0 / 15.0));

    for (int n : {1, 2, 5, 21, 41})
        CHECK(pmf_sum(DegreeDistribution::binomial(n)) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("sample: point mass, support, determinism") {
    const auto pm = DegreeDistribution::point_mass(5, 3);
    Rng rng(1);
    for (int i = 0; i < 100; ++i)
        CHECK(pm.sample(rng) == 3);

    const auto b = DegreeDistribution::binomial(4);
    Rng r1 = Rng::stream(7, {0});
    Rng r2 = Rng::stream(7, {0});
    for (int i = 0; i < 1000; ++i) {
        const int d = b.sample(r1);
        CHECK(d >= 1);
        CHECK(d <= 4);
        CHECK(d == b.sample(r2));
    }
}

TEST_CASE("sample: ideal soliton frequencies within 3-sigma multinomial bands") {
    const auto d = DegreeDistribution::ideal_soliton(4);
    Rng rng(20240);
    const int draws = 1000000;
    std::vector<long> counts(5, 0);
    for (int i = 0; i < draws; ++i)
        ++counts[static_cast<std::size_t>(d.sample(rng))];
    for (int deg = 1; deg <= 4; ++deg) {
        const double p = d.pmf(deg);
        const double sigma = std::sqrt(p * (1.0 - p) * draws);
        CHECK(std::abs(counts[static_cast<std::size_t>(deg)] - p * draws) <= 3.0 * sigma);
    }
}

TEST_CASE("sample: zero-mass degrees are never drawn") {
    const auto d = DegreeDistribution::standard_3gpp(21);
    Rng rng(5150);
    for (int i = 0; i < 20000; ++i) {
        const int deg = d.sample(rng);
        CHECK(d.pmf(deg) > 0.0);
    }
}

TEST_CASE("custom table file: parsing, renormalization band, rejection") {
    const std::string good = "/tmp/raptor_test_dist_good.txt";
    {
        std::ofstream out(good);
        out << "# comment line\n";
        out << "1 0.25\n2 0.5   # trailing comment\n";
        out << "4 0.25000000001\n"; // off by 1e-11 < 1e-9: renormalized
    }
    const auto d = DegreeDistribution::from_file(good);
    CHECK(d.support() == 4);
    CHECK(d.pmf(3) == 0.0);
    CHECK(pmf_sum(d) == doctest::Approx(1.0).epsilon(1e-13));

    const std::string bad = "/tmp/raptor_test_dist_bad.txt";
    {
        std::ofstream out(bad);
        out << "1 0.5\n2 0.6\n"; // sums to 1.1: outside the band
    }
    CHECK_THROWS_AS(DegreeDistribution::from_file(bad), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution::from_file("/tmp/raptor_no_such_file.txt"),
                    std::runtime_error);
    std::remove(good.c_str());
    std::remove(bad.c_str());
}
