#include "subchan/figures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "subchan/channel_model.hpp"
#include "subchan/csv.hpp"
#include "subchan/errors.hpp"
#include "subchan/mgf_error.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/order_stats.hpp"
#include "subchan/quadrature.hpp"
#include "subchan/random_matrix.hpp"
#include "subchan/rng.hpp"

namespace subchan {

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    if (points == 0) throw ParameterError("grid needs at least one point");
    if (points == 1) return {lo};
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    g.back() = hi;
    return g;
}

std::vector<double> logspace(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw ParameterError("geometric grid needs positive ends");
    auto g = linspace(std::log(lo), std::log(hi), points);
    for (auto& x : g) x = std::exp(x);
    g.front() = lo;
    if (points > 1) g.back() = hi;
    return g;
}

std::vector<KappaSweepRow> kappa_sweep(std::size_t n, std::size_t l, const std::vector<double>& ratios,
                                       std::size_t trials, std::uint64_t seed) {
    const auto base = exponential_law(1.0);
    std::vector<KappaSweepRow> rows;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double thr = ratios[i] * *base.mean;
        const std::uint64_t s = derive_seed(seed, i);
        KappaSweepRow r;
        r.thr_ratio = ratios[i];
        r.l0 = kappa_report({Operator::lambda0, ThresholdRule::fixed}, n, l, base, thr, trials, s);
        r.l = kappa_report({Operator::lambda, ThresholdRule::fixed}, n, l, base, thr, trials, s);
        r.lp = kappa_report({Operator::lambda_prime, ThresholdRule::fixed}, n, l, base, thr, trials, s);
        rows.push_back(r);
    }
    return rows;
}

void write_kappa_sweep_csv(std::ostream& os, const std::vector<KappaSweepRow>& rows) {
    CsvWriter w(os, {"thr_ratio", "kappa_l0", "kappa_l", "kappa_lp", "analytic_l0", "analytic_l", "analytic_lp",
                     "flag_l0", "flag_l", "flag_lp"});
    for (const auto& r : rows)
        w.row(r.thr_ratio, r.l0.empirical, r.l.empirical, r.lp.empirical, r.l0.analytic, r.l.analytic, r.lp.analytic,
              static_cast<int>(r.l0.analytic_flagged), static_cast<int>(r.l.analytic_flagged),
              static_cast<int>(r.lp.analytic_flagged));
}

std::vector<ErrorCurveRow> error_curves(std::size_t n, std::size_t l, double thr_ratio,
                                        const std::vector<double>& snr_hats) {
    const auto base = exponential_law(1.0);
    const double thr = thr_ratio * *base.mean;
    const auto m0 = operator_mgf_repr({Operator::lambda0, ThresholdRule::fixed}, n, l, base, thr, 0.5);
    const auto ml = operator_mgf_repr({Operator::lambda, ThresholdRule::fixed}, n, l, base, thr, 0.5);
    const auto mp = operator_mgf_repr({Operator::lambda_prime, ThresholdRule::fixed}, n, l, base, thr, 0.5);
    std::vector<ErrorCurveRow> rows;
    for (double s : snr_hats) rows.push_back({s, p_err_operator(m0, s), p_err_operator(ml, s), p_err_operator(mp, s)});
    return rows;
}

void write_error_curve_csv(std::ostream& os, const std::vector<ErrorCurveRow>& rows, Operator op) {
    CsvWriter w(os, {"snr_hat", "p_err"});
    for (const auto& r : rows) w.row(r.snr_hat, op == Operator::lambda0 ? r.l0 : op == Operator::lambda ? r.l : r.lp);
}

std::vector<CapacityRow> capacity_sweep(std::size_t l, std::size_t K, const std::vector<double>& r_values,
                                        const std::vector<double>& snrs, std::uint64_t seed) {
    const double chi = static_cast<double>(K) / static_cast<double>(l);
    std::vector<CapacityRow> rows;
    for (double r : r_values) {
        const auto prof = allocation_profile(l, K, r, seed);
        for (double s : snrs) {
            const auto cap = p_sym_profile(prof, chi, s);
            rows.push_back({s, r, cap.p_sym, cap.long_form});
        }
    }
    return rows;
}

void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows) {
    CsvWriter w(os, {"snr", "r", "p_sym"});
    for (const auto& r : rows) w.row(r.snr, r.r, r.p_sym);
}

namespace {

SuiteResult check(std::string name, double residual, double tol) {
    return {std::move(name), std::isfinite(residual) && residual <= tol, residual, tol};
}

std::vector<double> descending_exp(CounterRng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.exponential();
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

}  // namespace

std::vector<SuiteResult> run_validation(std::uint64_t seed, std::size_t trials) {
    if (trials < 100) throw ParameterError("validation needs at least 100 trials");
    std::vector<SuiteResult> out;
    const auto base = exponential_law(1.0);
    const double dkw = dkw_epsilon(trials, 1e-3);

    {  // DFT round trip and Parseval on a sampled transmittance vector.
        const auto tv = sample_transmittance_vector(256, 1.0, derive_seed(seed, 1));
        const auto back = idft(tv.FT);
        double err = 0.0, e_time = 0.0, e_freq = 0.0;
        for (std::size_t i = 0; i < back.size(); ++i) {
            err = std::max(err, std::abs(back[i] - tv.T[i]));
            e_time += std::norm(tv.T[i]);
            e_freq += std::norm(tv.FT[i]);
        }
        out.push_back(check("dft_round_trip", err, 1e-12));
        out.push_back(check("dft_parseval", std::abs(e_freq / 256.0 - e_time) / e_time, 1e-12));
    }

    {  // Ordered statistics and the top-sum density against sorted draws.
        const std::size_t n = 6, l = 3;
        const OrderedEnsemble ens{l, n, base};
        std::vector<std::vector<double>> ith(l);
        std::vector<double> sums;
        for (std::size_t t = 0; t < trials; ++t) {
            CounterRng rng(derive_seed(seed, 2), t);
            const auto block = descending_exp(rng, l);  // ordered values of the l-coefficient block
            for (std::size_t i = 0; i < l; ++i) ith[i].push_back(block[i]);
            const auto v = descending_exp(rng, n);
            sums.push_back(v[0] + v[1] + v[2]);
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < l; ++i)
            worst = std::max(worst, ks_distance(EmpiricalDist::from(ith[i]),
                                                [&](double x) { return ordered_cdf(ens, i + 1, x); }));
        out.push_back(check("ordered_statistics_ks", worst, dkw));
        const TabulatedCdf cdf([&](double x) { return top_sum_pdf(n, l, 1.0, x).value; }, 0.0, 40.0, 4000);
        out.push_back(check("top_sum_ks", ks_distance(EmpiricalDist::from(sums), [&](double x) { return cdf(x); }),
                            dkw + 1e-4));
    }

    {  // Error rate through the MGF against direct averaging, and Craig's form.
        double worst = 0.0;
        for (const auto& law : {exponential_law(1.0), gamma_law(3.0, 0.5), gamma_law(1.5, 2.0)})
            for (double s : {0.3, 1.0, 5.0}) {
                const ErrorRateSpec spec{1.0, 2.0, s};
                worst = std::max(worst, std::abs(avg_error_rate(spec, mgf_of(law)) - avg_error_rate_direct(spec, law)));
            }
        out.push_back(check("error_rate_two_routes", worst, 1e-7));
        double q = 0.0;
        for (double x = 0.0; x <= 6.0; x += 0.05) q = std::max(q, std::abs(q_craig(x) - q_function(x)));
        out.push_back(check("craig_tail", q, 1e-10));
    }

    {  // Iteration counts, operator MGFs and the top-up distribution.
        const std::size_t n = 16, l = 4;
        const double thr = 0.5;
        double kz = 0.0, mz = 0.0;
        const double x = -0.5;
        for (Operator op : {Operator::lambda0, Operator::lambda, Operator::lambda_prime}) {
            const OperatorKind kind{op, ThresholdRule::fixed};
            const auto rep = kappa_report(kind, n, l, base, thr, trials, derive_seed(seed, 3));
            kz = std::max(kz, rep.std_error > 0.0 ? std::abs(rep.exact - rep.empirical) / rep.std_error
                                                  : std::abs(rep.exact - rep.empirical) * 1e12);
            const Threshold t = Threshold::at(thr, l);
            const auto agg = run_trials({trials, derive_seed(seed, 4), 1}, [&](std::uint64_t s, std::size_t) {
                CounterRng rng(s);
                std::vector<double> mags(n);
                for (auto& m : mags) m = rng.exponential();
                return std::exp(x * run_operator(kind, mags, l, t).gain_sum);
            });
            mz = std::max(mz, std::abs(agg.mean - operator_mgf(kind, n, l, base, thr, 0.5, x)) / agg.std_error);
        }
        out.push_back(check("kappa_exact_zscore", kz, 4.0));
        out.push_back(check("operator_mgf_zscore", mz, 4.0));

        std::vector<double> means;
        const Threshold t = Threshold::at(thr, l);
        for (std::size_t i = 0; i < trials; ++i) {
            CounterRng rng(derive_seed(seed, 5), i);
            std::vector<double> mags(n);
            for (auto& m : mags) m = rng.exponential();
            means.push_back(run_operator({Operator::lambda_prime, ThresholdRule::fixed}, mags, l, t).A_j_sq);
        }
        // The distribution function is tabulated and interpolated; the sample
        // mean of l exponentials above 0 stays below 12 with overwhelming odds.
        const auto grid = linspace(0.0, 12.0, 601);
        std::vector<double> F(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) F[i] = lambda_prime_cdf(n, l, base, thr, grid[i]);
        auto cdf = [&](double v) {
            if (v <= 0.0) return 0.0;
            if (v >= grid.back()) return 1.0;
            const double pos = v / grid[1];
            const auto i = static_cast<std::size_t>(pos);
            return F[i] + (pos - static_cast<double>(i)) * (F[i + 1] - F[i]);
        };
        const double ks = ks_distance(EmpiricalDist::from(means), cdf);
        out.push_back(check("top_up_mean_cdf_ks", ks, dkw + 1e-3));
    }

    {  // Random-matrix law, fixed points and transforms.
        double mass = 0.0;
        for (double chi : {0.2, 0.5, 1.0, 2.0}) {
            const auto [u, v] = mp_support(chi);
            quad::Options opt;
            opt.abs_tol = 1e-12;
            const double m = mp_atom(chi) + quad::integrate([&](double z) { return mp_density(chi, z); }, u, v, opt);
            mass = std::max(mass, std::abs(m - 1.0));
        }
        out.push_back(check("mp_mass", mass, 1e-6));

        double fp = 0.0;
        const auto prof = constant_profile(64, 32, 1.0);
        for (double g : {1.0, 5.0, 20.0})
            fp = std::max(fp, std::abs(profile_eta_nu(prof, 0.5, g).eta - (1.0 - 0.5 * (1.0 - mp_eta(0.5, g)))));
        out.push_back(check("profile_fixed_point_mp", fp, 1e-7));

        const auto spec = empirical_spectrum(iid_matrix(256, 128, 1.0 / 256.0, derive_seed(seed, 6)));
        const auto& s = spec.sorted_sample;
        double sh = 0.0;
        for (double g = 0.1; g <= 100.0; g *= 1.5) {
            const double h = 1e-4 * g;
            const double dnu = (nu_transform(s, g + h) - nu_transform(s, g - h)) / (2.0 * h);
            sh = std::max(sh, std::abs(dnu * std::numbers::ln2 / ((1.0 - eta_transform(s, g)) / g) - 1.0));
        }
        out.push_back(check("shannon_identity", sh, 0.01));

        const auto model = hadamard_model(Eigen::MatrixXcd::Ones(256, 128), Eigen::VectorXcd::Ones(128),
                                          derive_seed(seed, 7));
        const auto ti = trace_identity(model, 5.0);
        out.push_back(check("trace_identity", std::abs(ti.lhs - ti.rhs) / ti.rhs, 0.02));

        double cap = 0.0;
        const auto ap = allocation_profile(32, 16, 0.5, derive_seed(seed, 8));
        for (double snr : {1.0, 5.0, 20.0}) {
            const auto c = p_sym_profile(ap, 0.5, snr);
            cap = std::max(cap, std::abs(c.p_sym / c.long_form - 1.0));
        }
        out.push_back(check("capacity_short_long", cap, 0.01));
    }
    return out;
}

void write_validation_csv(std::ostream& os, const std::vector<SuiteResult>& results) {
    CsvWriter w(os, {"suite", "passed", "residual", "tolerance"});
    for (const auto& r : results) w.row(r.name, static_cast<int>(r.passed), r.residual, r.tolerance);
}

}  // namespace subchan
