#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "subchan/errors.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/rng.hpp"

using namespace subchan;

TEST_CASE("empirical cdf") {
    const auto d = EmpiricalDist::from({3.0, 1.0, 2.0});
    CHECK(empirical_cdf(d, 0.5) == 0.0);
    CHECK(empirical_cdf(d, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(empirical_cdf(d, 2.5) == doctest::Approx(2.0 / 3.0));
    CHECK(empirical_cdf(d, 3.0) == 1.0);

    const auto two = EmpiricalDist::from({0.0, 1.0});
    CHECK(empirical_cdf(two, 0.5) == 0.5);
}

TEST_CASE("Kolmogorov-Smirnov distance") {
    const auto one = EmpiricalDist::from({0.5});
    auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_distance(one, uniform) == doctest::Approx(0.5));
    const auto perfect = EmpiricalDist::from({0.25, 0.75});
    CHECK(ks_distance(perfect, uniform) == doctest::Approx(0.25));

    // Exponential draws stay inside the DKW band at 99.9%.
    CounterRng rng(901);
    std::vector<double> s(20000);
    for (auto& x : s) x = rng.exponential();
    const double ks = ks_distance(EmpiricalDist::from(s), [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); });
    CHECK(ks < dkw_epsilon(s.size(), 1e-3));
    CHECK(dkw_epsilon(1000, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)));
}

TEST_CASE("empirical spectrum") {
    const auto z = empirical_spectrum(Eigen::MatrixXcd::Zero(3, 5));
    REQUIRE(z.n() == 3);
    for (double x : z.sorted_sample) CHECK(x == 0.0);

    const auto id = empirical_spectrum(Eigen::MatrixXcd::Identity(4, 4));
    for (double x : id.sorted_sample) CHECK(x == doctest::Approx(1.0));

    Eigen::MatrixXcd m(2, 2);
    m << 2.0, 0.0, 0.0, std::complex<double>(0.0, 3.0);
    const auto d = empirical_spectrum(m);
    CHECK(d.sorted_sample[0] == doctest::Approx(4.0));
    CHECK(d.sorted_sample[1] == doctest::Approx(9.0));

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(empirical_spectrum(bad), NumericError);
}

TEST_CASE("trial runner") {
    const auto one = run_trials({1, 5, 1}, [](std::uint64_t, std::size_t) { return 2.5; });
    CHECK(one.count == 1);
    CHECK(one.mean == 2.5);
    CHECK(one.variance == 0.0);

    const auto c = run_trials({100, 5, 1}, [](std::uint64_t, std::size_t) { return 7.0; });
    CHECK(c.mean == 7.0);
    CHECK(c.variance == 0.0);
    CHECK(c.min == 7.0);
    CHECK(c.max == 7.0);

    auto draw = [](std::uint64_t seed, std::size_t) {
        CounterRng rng(seed);
        return rng.exponential(2.0);
    };
    const auto e = run_trials({200000, 11, 1}, draw);
    CHECK(std::abs(e.mean - 2.0) < 4.0 * e.std_error);
    CHECK(e.std_error == doctest::Approx(std::sqrt(e.variance / 200000.0)));

    // Results do not depend on the worker count.
    const auto a = map_trials<double>({5000, 12, 1}, draw);
    const auto b = map_trials<double>({5000, 12, 4}, draw);
    CHECK(a == b);
    const auto ra = run_trials({5000, 12, 1}, draw), rb = run_trials({5000, 12, 3}, draw);
    CHECK(ra.mean == rb.mean);
    CHECK(ra.variance == rb.variance);

    CHECK_THROWS_AS(run_trials({0, 1, 1}, draw), ParameterError);
}

TEST_CASE("trial failures report the lowest failing index") {
    auto fn = [](std::uint64_t, std::size_t i) -> double {
        if (i == 7 || i == 30) throw std::runtime_error("boom");
        return 1.0;
    };
    for (std::size_t workers : {1u, 4u}) {
        try {
            run_trials({50, 3, workers}, fn);
            FAIL("expected a failure");
        } catch (const TrialFailure& f) {
            CHECK(f.index() == 7);
            CHECK(f.seed() == derive_seed(3, 7));
            CHECK(std::string(f.what()).find("boom") != std::string::npos);
        }
    }
}

TEST_CASE("histogram") {
    const std::vector<double> v{-1.0, 0.0, 0.2, 0.5, 0.99, 1.0, 3.0};
    const auto h = histogram(v, 2, 0.0, 1.0);
    CHECK(h.below == 1);
    CHECK(h.above == 1);
    CHECK(h.counts == std::vector<std::size_t>{2, 3});
    std::ostringstream os;
    write_histogram_csv(os, h);
    CHECK(os.str() == "bin_lo,bin_hi,count\n0,0.5,2\n0.5,1,3\n");
}

TEST_CASE("tabulated cdf") {
    const TabulatedCdf F([](double x) { return std::exp(-x); }, 0.0, 40.0, 4000);
    CHECK(F.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(F(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
    CHECK(F(-1.0) == 0.0);
    CHECK(F(100.0) == doctest::Approx(1.0).epsilon(1e-6));
    const TabulatedCdf G([](double) { return 0.5; }, 0.0, 1.0, 10, 0.5);
    CHECK(G(0.0) == 0.5);
    CHECK(G(0.5) == doctest::Approx(0.75));
}
