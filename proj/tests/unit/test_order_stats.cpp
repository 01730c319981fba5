#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "subchan/errors.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/order_stats.hpp"
#include "subchan/quadrature.hpp"
#include "subchan/rng.hpp"

using namespace subchan;

namespace {

OrderedEnsemble ens_exp(std::size_t n, std::size_t l, double mean = 1.0) { return {l, n, exponential_law(mean)}; }

// Descending sorted exponential draws, one vector per trial.
template <class Fn>
void sorted_trials(std::size_t trials, std::size_t n, std::uint64_t seed, Fn&& fn) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, t);
        for (auto& x : v) x = rng.exponential();
        std::sort(v.begin(), v.end(), std::greater<>());
        fn(v);
    }
}

double ks_from_pdf(std::vector<double> sample, const std::function<double(double)>& pdf, double hi, double atom = 0.0) {
    const TabulatedCdf cdf(pdf, 0.0, hi, 4000, atom);
    return ks_distance(EmpiricalDist::from(std::move(sample)), [&](double x) { return cdf(x); });
}

DistributionDescriptor uniform01() {
    DistributionDescriptor d;
    d.pdf = [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; };
    d.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    d.lo = 0.0;
    d.hi = 1.0;
    return d;
}

}  // namespace

TEST_CASE("descriptors validate") {
    CHECK_NOTHROW(validate_descriptor(exponential_law(2.0)));
    CHECK_NOTHROW(validate_descriptor(gamma_law(3.0, 0.5)));
    CHECK_NOTHROW(validate_descriptor(uniform01()));
    auto bad = exponential_law(1.0);
    bad.pdf = [](double x) { return 2.0 * std::exp(-x); };
    CHECK_THROWS_AS(validate_descriptor(bad), ParameterError);
}

TEST_CASE("ordered pdf: small cases") {
    const auto e1 = ens_exp(1, 1);
    for (double x : {0.0, 0.3, 2.0}) CHECK(ordered_pdf(e1, 1, x) == doctest::Approx(std::exp(-x)));
    const auto e2 = ens_exp(2, 2);
    for (double x : {0.1, 1.0, 3.0})
        CHECK(ordered_pdf(e2, 1, x) == doctest::Approx(2.0 * (1.0 - std::exp(-x)) * std::exp(-x)).epsilon(1e-13));
    CHECK_THROWS_AS(ordered_pdf(e2, 0, 1.0), ParameterError);
    CHECK_THROWS_AS(ordered_pdf(e2, 3, 1.0), ParameterError);
}

TEST_CASE("ordered pdf: the l order statistics relabel the sample") {
    const auto e = ens_exp(5, 5);
    for (double x : {0.05, 0.5, 1.7, 6.0}) {
        double s = 0.0;
        for (std::size_t i = 1; i <= 5; ++i) s += ordered_pdf(e, i, x);
        CHECK(std::abs(s - 5.0 * std::exp(-x)) < 1e-9);
    }
}

TEST_CASE("ordered pdf: third of five against sorted samples") {
    std::vector<double> third;
    sorted_trials(1'000'000, 5, 501, [&](const std::vector<double>& v) { third.push_back(v[2]); });
    const auto e = ens_exp(5, 5);
    const double ks =
        ks_distance(EmpiricalDist::from(std::move(third)), [&](double x) { return ordered_cdf(e, 3, x); });
    CHECK(ks < 0.005);
}

TEST_CASE("joint densities") {
    const auto e1 = ens_exp(1, 1);
    const std::vector<double> p1{0.8};
    CHECK(joint_pdf_all(e1, p1) == doctest::Approx(std::exp(-0.8)));

    const auto e2 = ens_exp(2, 2);
    const std::vector<double> p2{1.0, 0.5};
    CHECK(joint_pdf_all(e2, p2) == doctest::Approx(2.0 * std::exp(-1.0) * std::exp(-0.5)).epsilon(1e-14));
    const std::vector<double> asc{0.5, 1.0};
    CHECK(joint_pdf_all(e2, asc) == 0.0);
    CHECK(joint_pdf(e2, JointMode::selected_from_n, asc) == 0.0);

    // Top two of four integrate to one over x0 >= x1 >= 0.
    const auto e42 = ens_exp(4, 2);
    auto inner = [&](double x0) {
        return quad::integrate_gk(
            [&](double x1) {
                const std::vector<double> p{x0, x1};
                return joint_pdf_selected(e42, p);
            },
            0.0, x0, 1e-12, 1e-10);
    };
    CHECK(std::abs(quad::integrate_gk(inner, 0.0, 60.0, 1e-10, 1e-10) - 1.0) < 1e-4);

    // Pair form for the top two of three matches the direct marginal.
    const auto e3 = ens_exp(3, 3);
    const double x = 1.3, y = 0.4;
    const double direct = 6.0 * std::exp(-x) * std::exp(-y) * (1.0 - std::exp(-y));
    CHECK(joint_pdf_pair(e3, 1, 2, x, y) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(joint_pdf_pair(e3, 1, 2, y, x) == 0.0);
}

TEST_CASE("residual density") {
    const auto b = exponential_law(1.0);
    for (double x : {0.7, 1.0, 4.0}) CHECK(residual_pdf(b, 0.7, x) == doctest::Approx(std::exp(-(x - 0.7))));
    CHECK(residual_pdf(b, 0.7, 0.5) == 0.0);
    const double mass = quad::integrate([&](double x) { return residual_pdf(b, 0.7, x); }, 0.7,
                                        std::numeric_limits<double>::infinity());
    CHECK(std::abs(mass - 1.0) < 1e-8);
    CHECK_THROWS_AS(residual_pdf(uniform01(), 1.0, 1.0), SingularityError);
}

TEST_CASE("conditional density: second of three given the largest") {
    const auto e = ens_exp(3, 3);
    const double y = 1.0;
    const double mass = quad::integrate_gk([&](double x) { return conditional_pdf(e, 2, 1, y, x); }, 0.0, y);
    CHECK(std::abs(mass - 1.0) < 1e-6);

    // Rejection conditioning: keep triples whose maximum lands near y.
    std::vector<double> second;
    sorted_trials(4'000'000, 3, 502, [&](const std::vector<double>& v) {
        if (std::abs(v[0] - y) < 0.01) second.push_back(v[1]);
    });
    REQUIRE(second.size() > 20000);
    const double ks = ks_from_pdf(second, [&](double x) { return conditional_pdf(e, 2, 1, y, x); }, y);
    CHECK(ks < 0.01);
}

TEST_CASE("conditional densities normalize") {
    const auto e = ens_exp(6, 4);
    for (std::size_t m : {2, 3, 4}) {
        const double mass = quad::integrate_gk([&](double x) { return conditional_pdf(e, m, 1, 1.5, x); }, 0.0, 1.5);
        CHECK(std::abs(mass - 1.0) < 1e-6);
    }
    const double y = 0.6;
    const double mass =
        quad::integrate_gk([&](double u) { return upper_sum_conditional_pdf(e, y, u); }, 3.0 * y,
                           std::numeric_limits<double>::infinity());
    CHECK(std::abs(mass - 1.0) < 1e-6);
    // The generic truncated-convolution route for a non-exponential base.
    OrderedEnsemble g{3, 5, gamma_law(2.0, 1.0)};
    const double gm = quad::integrate_gk([&](double u) { return upper_sum_conditional_pdf(g, 0.8, u); }, 1.6,
                                         std::numeric_limits<double>::infinity());
    CHECK(std::abs(gm - 1.0) < 1e-6);
}

TEST_CASE("partial sum density: reductions") {
    const auto e1 = ens_exp(3, 1);
    for (double x : {0.2, 1.0, 2.5}) CHECK(partial_sum_pdf(e1, x) == doctest::Approx(ordered_pdf(ens_exp(3, 3), 1, x)));
    CHECK(partial_sum_pdf(ens_exp(4, 2), -1.0) == 0.0);
    // Full sums of exchangeable draws: Gamma(l) densities.
    for (std::size_t l : {2, 3, 4}) {
        const auto e = ens_exp(l, l);
        for (double x : {0.3, 1.0, 2.2, 5.0}) {
            const double gamma_pdf = std::pow(x, double(l - 1)) * std::exp(-x) / std::tgamma(double(l));
            CHECK(std::abs(partial_sum_pdf(e, x) - gamma_pdf) < 1e-8);
        }
    }
}

TEST_CASE("partial sum density: four of four against sums of draws") {
    std::vector<double> sums;
    sorted_trials(1'000'000, 4, 503, [&](const std::vector<double>& v) { sums.push_back(v[0] + v[1] + v[2] + v[3]); });
    const auto e = ens_exp(4, 4);
    CHECK(ks_from_pdf(sums, [&](double x) { return partial_sum_pdf(e, x); }, 40.0) < 0.01);
}

TEST_CASE("truncated exponentials") {
    CHECK(band_exp_mgf(1.0, 0.5, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : {0.1, 0.5, 3.0})
        CHECK(truncated_exp_pdf(2.0, std::numeric_limits<double>::infinity(), x) ==
              doctest::Approx(0.5 * std::exp(-x / 2.0)));
    // Restrict the exponential to [0.5, 2] and renormalize by quadrature.
    const double z = quad::integrate([](double t) { return std::exp(-t); }, 0.5, 2.0);
    CHECK(band_exp_pdf(1.0, 0.5, 2.0, 1.0) == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-9));
    CHECK(band_exp_pdf(1.0, 0.5, 2.0, 2.5) == 0.0);
    CHECK_THROWS_AS(band_exp_pdf(1.0, 2.0, 0.5, 1.0), ParameterError);
    const double w = 0.3;
    const double mgf = quad::integrate([&](double t) { return std::exp(w * t) * std::exp(-t); }, 0.5, 2.0) / z;
    CHECK(band_exp_mgf(1.0, 0.5, 2.0, w) == doctest::Approx(mgf).epsilon(1e-9));
}

TEST_CASE("top-l sum: MGF") {
    CHECK(top_sum_mgf(6, 3, 1.0, 0.0) == 1.0);
    for (double w : {-2.0, -0.3, 0.4}) CHECK(top_sum_mgf(5, 5, 1.0, w) == doctest::Approx(std::pow(1.0 - w, -5.0)));
    CHECK_THROWS_AS(top_sum_mgf(5, 2, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(top_sum_mgf(5, 2, 2.0, 0.6), DomainError);
    // Product of the per-term factors.
    double prod = 1.0;
    for (std::size_t k = 1; k <= 7; ++k) prod *= top_sum_term_mgf(k, 3, 1.5, -0.4);
    CHECK(top_sum_mgf(7, 3, 1.5, -0.4) == doctest::Approx(prod).epsilon(1e-14));
}

TEST_CASE("top-l sum: closed density") {
    const double mass =
        quad::integrate([](double x) { return top_sum_pdf(5, 3, 1.0, x).value; }, 0.0,
                        std::numeric_limits<double>::infinity(), {1e-11, 0.0, std::size_t{1} << 20});
    CHECK(std::abs(mass - 1.0) < 1e-6);

    std::vector<double> sums;
    sorted_trials(1'000'000, 5, 504, [&](const std::vector<double>& v) { sums.push_back(v[0] + v[1] + v[2]); });
    CHECK(ks_from_pdf(sums, [](double x) { return top_sum_pdf(5, 3, 1.0, x).value; }, 40.0) < 0.01);

    // Agrees with the quadrature route where the series is well conditioned.
    const auto e = ens_exp(5, 3);
    for (double x : {1.0, 3.0, 6.0}) {
        const auto fv = top_sum_pdf(5, 3, 1.0, x);
        CHECK(fv.value == doctest::Approx(partial_sum_pdf(e, x)).epsilon(1e-6));
    }
}

TEST_CASE("lth largest and the sum above it") {
    const std::size_t n = 6, l = 3;
    CounterRng rng(505);
    for (int k = 0; k < 50; ++k) {
        const double g2 = 3.0 * rng.uniform();
        const double g1 = double(l - 1) * g2 + 4.0 * rng.uniform();
        const double joint = exp_lth_largest_upper_sum_pdf(n, l, 1.0, g2, g1);
        const double fact = exp_lth_largest_pdf(n, l, 1.0, g2) * exp_upper_sum_conditional_pdf(l, 1.0, g2, g1);
        CHECK(std::abs(joint - fact) <= 1e-9 * std::abs(fact));
    }
    CHECK(exp_lth_largest_upper_sum_pdf(n, l, 1.0, 1.0, 1.5) == 0.0);

    const double mass = quad::integrate([&](double g) { return exp_lth_largest_pdf(n, l, 1.0, g); }, 0.0,
                                        std::numeric_limits<double>::infinity());
    CHECK(std::abs(mass - 1.0) < 1e-6);
    for (double g : {0.1, 0.7, 2.0})
        CHECK(exp_lth_largest_pdf(n, l, 1.0, g) == doctest::Approx(order_statistic_pdf(exponential_law(), n, l, g)));

    // Marginals of (l-th largest, sum of the l-1 above) against sorted samples.
    std::vector<double> s2, s1;
    sorted_trials(1'000'000, n, 506, [&](const std::vector<double>& v) {
        s2.push_back(v[l - 1]);
        s1.push_back(v[0] + v[1]);
    });
    CHECK(ks_from_pdf(s2, [&](double g) { return exp_lth_largest_pdf(n, l, 1.0, g); }, 20.0) < 0.02);
    auto g1_marginal = [&](double g1) {
        return quad::integrate_gk([&](double g2) { return exp_lth_largest_upper_sum_pdf(n, l, 1.0, g2, g1); }, 0.0,
                                  g1 / double(l - 1), 1e-13, 1e-10);
    };
    CHECK(ks_from_pdf(s1, g1_marginal, 40.0) < 0.02);
}

TEST_CASE("exponential hazard and the Gumbel limit") {
    const auto b = exponential_law(2.5);
    for (double x : {0.0, 0.4, 3.0, 10.0}) CHECK((1.0 - b.cdf(x)) / b.pdf(x) == doctest::Approx(2.5).epsilon(1e-12));

    const double l = 1e4;
    double sup = 0.0;
    for (double x = 2.0; x < 20.0; x += 0.01) {
        const double g = std::exp(-std::exp(-(x - std::log(l))));
        sup = std::max(sup, std::abs(order_statistic_cdf(exponential_law(), 10000, 1, x) - g));
    }
    CHECK(sup < 0.01);
}

TEST_CASE("density csv export") {
    std::ostringstream os;
    const std::vector<double> grid{0.0, 0.5, 1.0};
    write_density_csv(os, grid, [](double x) { return std::exp(-x); });
    const std::string s = os.str();
    CHECK(s.rfind("x,pdf\n0,1\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
