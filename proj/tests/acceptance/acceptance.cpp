// One PASS/FAIL line per acceptance criterion. argv[1] is the CLI executable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subchan/figures.hpp"
#include "subchan/mgf_error.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/order_stats.hpp"
#include "subchan/quadrature.hpp"
#include "subchan/random_matrix.hpp"
#include "subchan/rng.hpp"
#include "subchan/selection.hpp"

using namespace subchan;

namespace {

std::string cli_path;
int failures = 0;

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

void report(int id, bool pass, const std::string& detail, double seconds) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << " [" << fmt(seconds, 3)
              << " s]" << std::endl;
    if (!pass) ++failures;
}

template <class Fn>
void criterion(int id, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        detail += std::string(" exception: ") + e.what();
    }
    report(id, pass, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

double ks_tabulated(std::vector<double> sample, const std::function<double(double)>& pdf, double hi,
                    std::size_t cells = 2000) {
    const TabulatedCdf cdf(pdf, 0.0, hi, cells);
    return ks_distance(EmpiricalDist::from(std::move(sample)), [&](double x) { return cdf(x); });
}

// Probability that the largest coordinate is <= a under an ordered joint
// density on a >= x1 >= x2 >= ... >= x_d >= 0.
double ordered_box_mass(const std::function<double(std::span<const double>)>& joint, std::size_t dim, double a) {
    std::vector<double> point(dim);
    std::function<double(std::size_t, double)> level = [&](std::size_t k, double upper) -> double {
        return quad::integrate_gk(
            [&](double x) {
                point[k] = x;
                return k + 1 == dim ? joint(point) : level(k + 1, x);
            },
            0.0, upper, 1e-10, 1e-8);
    };
    return level(0, a);
}

// Sup of |empirical - analytic| over the sample's quantiles at 2.5%, 5%, ..., 97.5%.
double grid_ks(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    double worst = 0.0;
    for (int q = 1; q < 40; ++q) {
        const double a = sample[static_cast<std::size_t>(q * 0.025 * static_cast<double>(sample.size()))];
        const double emp = static_cast<double>(std::upper_bound(sample.begin(), sample.end(), a) - sample.begin()) /
                           static_cast<double>(sample.size());
        worst = std::max(worst, std::abs(emp - cdf(a)));
    }
    return worst;
}

// Gaussian tail by its Maclaurin series in extended precision.
double q_series(double xd) {
    const long double x = xd;
    long double term = x, sum = 0.0L;
    for (int n = 0; n < 400; ++n) {
        sum += term / (2 * n + 1);
        term *= -x * x / (2.0L * (n + 1));
        if (std::fabs(term) < 1e-30L) break;
    }
    return static_cast<double>(0.5L - sum / std::sqrt(2.0L * std::numbers::pi_v<long double>));
}

std::vector<double> eigenvalues_of_gram(const Eigen::MatrixXcd& F) {
    const Eigen::MatrixXcd G = F * F.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    for (auto& x : ev) x = std::max(x, 0.0);
    return ev;
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + cli_path + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

bool order_statistics(std::string& detail) {
    const std::size_t trials = 1'000'000;
    const auto base = exponential_law(1.0);
    const double tol = 0.01;
    double worst = 0.0;
    std::string worst_name;
    auto note = [&](const std::string& name, double ks) {
        if (ks > worst) {
            worst = ks;
            worst_name = name;
        }
    };

    for (auto [n, l] : {std::pair<std::size_t, std::size_t>{4, 2}, {6, 3}, {8, 4}}) {
        const std::string tag = "(" + std::to_string(n) + "," + std::to_string(l) + ")";
        const OrderedEnsemble ens{l, n, base};
        const OrderedEnsemble full{l, l, base};
        // block: the l-coefficient block in descending order; ith: descending n-population.
        std::vector<std::vector<double>> block(l), ith(n);
        std::vector<double> top_sum, upper_sum, residual;
        const double y_res = 0.5;
        for (std::size_t t = 0; t < trials; ++t) {
            CounterRng rng(derive_seed(1000 + n, 0), t);
            std::vector<double> v(n);
            for (auto& x : v) x = rng.exponential();
            if (v[0] > y_res) residual.push_back(v[0]);
            std::vector<double> w(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(l));
            std::sort(w.begin(), w.end(), std::greater<>());
            for (std::size_t i = 0; i < l; ++i) block[i].push_back(w[i]);
            std::sort(v.begin(), v.end(), std::greater<>());
            for (std::size_t i = 0; i < n; ++i) ith[i].push_back(v[i]);
            top_sum.push_back(std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(l), 0.0));
            upper_sum.push_back(std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(l - 1), 0.0));
        }

        // Ordered marginals.
        for (std::size_t i = 1; i <= l; ++i)
            note("ordered " + std::to_string(i) + tag,
                 ks_distance(EmpiricalDist::from(block[i - 1]), [&](double x) { return ordered_cdf(ens, i, x); }));

        // Pair joint through the law of the pair sum.
        for (std::size_t m = 2; m <= l; ++m) {
            std::vector<double> s(trials);
            for (std::size_t t = 0; t < trials; ++t) s[t] = block[0][t] + block[m - 1][t];
            auto pdf = [&](double z) {
                return quad::integrate_gk([&](double x) { return joint_pdf_pair(ens, 1, m, x, z - x); }, z / 2.0, z,
                                          1e-12, 1e-9);
            };
            note("pair(1," + std::to_string(m) + ")" + tag, ks_tabulated(s, pdf, 40.0));
        }

        // Full joints through the law of their largest coordinate.
        auto sel = [&](std::span<const double> p) { return joint_pdf_selected(ens, p); };
        note("joint selected" + tag,
             grid_ks(ith[0], [&](double a) { return ordered_box_mass(sel, l, a); }));
        auto all = [&](std::span<const double> p) { return joint_pdf_all(full, p); };
        note("joint all" + tag, grid_ks(block[0], [&](double a) { return ordered_box_mass(all, l, a); }));

        // Conditionals mixed over the conditioning statistic reproduce marginals.
        for (auto [m, i] : {std::pair<std::size_t, std::size_t>{2, 1}, {l, 1}, {l, l - 1}}) {
            if (m <= i) continue;
            auto mix = [&](double x) {
                return quad::integrate_gk(
                    [&](double y) { return conditional_pdf(ens, m, i, y, x) * ordered_pdf(ens, i, y); }, x, 60.0,
                    1e-12, 1e-9);
            };
            note("conditional " + std::to_string(m) + "|" + std::to_string(i) + tag, ks_tabulated(block[m - 1], mix, 20.0));
        }
        auto up_mix = [&](double u) {
            return quad::integrate_gk(
                [&](double y) { return upper_sum_conditional_pdf(ens, y, u) * order_statistic_pdf(base, n, l, y); }, 0.0,
                u / static_cast<double>(l - 1), 1e-12, 1e-9);
        };
        note("upper sum conditional" + tag, ks_tabulated(upper_sum, up_mix, 50.0));
        auto exp_up_mix = [&](double u) {
            return quad::integrate_gk(
                [&](double y) { return exp_upper_sum_conditional_pdf(l, 1.0, y, u) * exp_lth_largest_pdf(n, l, 1.0, y); },
                0.0, u / static_cast<double>(l - 1), 1e-12, 1e-9);
        };
        note("exponential upper sum conditional" + tag, ks_tabulated(upper_sum, exp_up_mix, 50.0));

        // Residual above a level.
        note("residual" + tag, ks_distance(EmpiricalDist::from(residual), [&](double x) {
                 return quad::integrate_gk([&](double z) { return residual_pdf(base, y_res, z); }, y_res,
                                           std::max(x, y_res), 1e-13, 1e-10);
             }));
        note("exponential residual" + tag, ks_distance(EmpiricalDist::from(residual), [&](double x) {
                 return quad::integrate_gk([&](double z) { return exp_residual_pdf(1.0, z, y_res); }, y_res,
                                           std::max(x, y_res), 1e-13, 1e-10);
             }));

        // Sums of the strongest l.
        note("partial sum" + tag, ks_tabulated(top_sum, [&](double x) { return partial_sum_pdf(ens, x); }, 50.0));
        note("top sum series" + tag,
             ks_tabulated(top_sum, [&](double x) { return top_sum_pdf(n, l, 1.0, x).value; }, 50.0));
        note("l-th largest" + tag,
             ks_tabulated(ith[l - 1], [&](double g) { return exp_lth_largest_pdf(n, l, 1.0, g); }, 20.0));
        auto g1_marginal = [&](double g1) {
            return quad::integrate_gk([&](double g2) { return exp_lth_largest_upper_sum_pdf(n, l, 1.0, g2, g1); }, 0.0,
                                      g1 / static_cast<double>(l - 1), 1e-12, 1e-9);
        };
        note("l-th largest and sum above" + tag, ks_tabulated(upper_sum, g1_marginal, 50.0));
    }
    detail = "worst KS " + fmt(worst) + " (" + worst_name + "), tolerance " + fmt(tol) + ", 1e6 trials per (n,l)";
    return worst <= tol;
}

bool mgf_consistency(std::string& detail) {
    double worst = 0.0;
    for (const auto& law : {exponential_law(1.0), gamma_law(3.0, 0.5), gamma_law(1.5, 2.0)})
        for (double s : {0.1, 0.3, 1.0, 5.0, 20.0}) {
            const ErrorRateSpec spec{1.0, 2.0, s};
            worst = std::max(worst, std::abs(avg_error_rate(spec, mgf_of(law)) - avg_error_rate_direct(spec, law)));
        }
    double q = 0.0;
    for (double x = 0.0; x <= 6.0 + 1e-12; x += 0.01) q = std::max(q, std::abs(q_craig(x) - q_series(x)));
    detail = "MGF vs density route max gap " + fmt(worst) + " (tol 1e-7); Craig vs series max gap " + fmt(q) +
             " (tol 1e-10)";
    return worst < 1e-7 && q < 1e-10;
}

bool selection_operators(std::string& detail) {
    const std::size_t n = 64, l = 16, trials = 200'000;
    const auto ratios = linspace(0.0, 2.0, 21);

    // Structural checks on random instances at every threshold ratio.
    std::size_t eq_checked = 0, eq_failed = 0, lp_short = 0;
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        const Threshold thr = Threshold::at(ratios[r], l);
        for (std::size_t t = 0; t < 2000; ++t) {
            CounterRng rng(derive_seed(77, r), t);
            std::vector<double> mags(n);
            for (auto& m : mags) m = rng.exponential();
            std::vector<std::size_t> desc(n);
            std::iota(desc.begin(), desc.end(), 0);
            std::sort(desc.begin(), desc.end(), [&](auto a, auto b) { return mags[a] > mags[b]; });
            ScanOptions opt;
            opt.order = desc;
            const auto a = run_operator({Operator::lambda0, ThresholdRule::fixed}, mags, l, thr);
            const auto b = run_operator({Operator::lambda, ThresholdRule::fixed}, mags, l, thr, opt);
            const auto c = run_operator({Operator::lambda_prime, ThresholdRule::fixed}, mags, l, thr);
            if (a.good_set.size() >= l) {
                ++eq_checked;
                if (std::set(a.selected.begin(), a.selected.end()) != std::set(b.selected.begin(), b.selected.end()))
                    ++eq_failed;
            }
            if (c.selected.size() != l) ++lp_short;
        }
    }

    const auto rows = kappa_sweep(n, l, ratios, trials, 2024);
    std::size_t order_fail = 0, silent = 0, flagged = 0;
    for (const auto& r : rows) {
        if (!(r.l.empirical <= r.lp.empirical && r.lp.empirical <= r.l0.empirical)) ++order_fail;
        for (const auto* rep : {&r.l0, &r.l, &r.lp}) {
            const bool gap = std::abs(rep->analytic - rep->empirical) > 0.05 * std::abs(rep->empirical);
            if (gap && !rep->analytic_flagged) ++silent;
            if (rep->analytic_flagged) ++flagged;
        }
    }
    detail = "set equality " + std::to_string(eq_checked - eq_failed) + "/" + std::to_string(eq_checked) +
             "; top-up short results " + std::to_string(lp_short) + "; kappa ordering violations " +
             std::to_string(order_fail) + "/" + std::to_string(rows.size()) + " ratios; closed-form gaps flagged " +
             std::to_string(flagged) + ", unflagged " + std::to_string(silent);
    return eq_failed == 0 && eq_checked > 0 && lp_short == 0 && order_fail == 0 && silent == 0;
}

bool error_probability(std::string& detail) {
    const std::size_t n = 6, l = 3;
    const double thr_ratio = 0.1;
    const std::vector<double> grid{0.5, 1.0, 2.0, 4.0, 8.0};
    const auto rows = error_curves(n, l, thr_ratio, grid);
    std::size_t mono_fail = 0, order_fail = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && !(rows[i].l0 < rows[i - 1].l0 && rows[i].l < rows[i - 1].l && rows[i].lp < rows[i - 1].lp))
            ++mono_fail;
        if (!(rows[i].l0 <= rows[i].lp && rows[i].lp <= rows[i].l)) ++order_fail;
    }
    // Beyond the grid the complete scan settles on its no-qualifier floor
    // 0.5 F(thr)^n, so the top-up operator eventually overtakes it.
    double crossover = 0.0;
    for (const auto& r : error_curves(n, l, thr_ratio, logspace(8.0, 100.0, 45)))
        if (crossover == 0.0 && r.l0 > r.lp) crossover = r.snr_hat;
    const auto& last = rows.back();
    detail = "n=6, l=3, threshold 0.1 x mean, snr_hat in {0.5,1,2,4,8}: monotonicity violations " +
             std::to_string(mono_fail) + ", ordering violations " + std::to_string(order_fail) + "; at 8: " +
             fmt(last.l0) + " <= " + fmt(last.lp) + " <= " + fmt(last.l) +
             "; complete scan rises above the top-up operator from snr_hat " + fmt(crossover, 3);
    return mono_fail == 0 && order_fail == 0;
}

bool random_matrix_law(std::string& detail) {
    const auto F = iid_matrix(1024, 512, 1.0 / 1024.0, 5150);
    const auto spec = empirical_spectrum(F);  // F^H F: 512 eigenvalues, ratio 0.5
    const double ks = ks_distance(spec, [](double x) { return mp_cdf(0.5, x); });

    double mass = 0.0;
    for (double chi : {0.2, 0.5, 1.0, 2.0}) {
        const auto [u, v] = mp_support(chi);
        const double m = mp_atom(chi) + quad::integrate_gk([&](double x) { return mp_density(chi, x); }, u, v,
                                                           1e-13, 1e-12);
        mass = std::max(mass, std::abs(m - 1.0));
    }

    const auto dir = std::filesystem::temp_directory_path() / "subchan_acceptance_fig6";
    std::filesystem::create_directories(dir);
    const auto out = dir / "mp.csv";
    const int rc = run_cli("fig6 chi=0.2,0.5,1 out=\"" + out.string() + "\"");
    bool files = rc == 0;
    for (const char* c : {"0.2", "0.5", "1"}) {
        const auto p = dir / (std::string("mp_chi") + c + ".csv");
        const std::string s = slurp(p);
        files = files && s.rfind("x,f_chi\n", 0) == 0 && std::count(s.begin(), s.end(), '\n') > 100;
    }
    const std::string one = slurp(dir / "mp_chi1.csv");
    files = files && one.find("\n0,0\n") != std::string::npos && one.size() >= 4 &&
            one.substr(one.size() - 4) == "4,0\n";
    detail = "KS at 1024x512 " + fmt(ks) + " (tol 0.05); worst mass error " + fmt(mass) +
             " (tol 1e-6); fig6 CSVs for 0.2, 0.5, 1 " + (files ? "written" : "missing or malformed");
    return ks < 0.05 && mass < 1e-6 && files;
}

bool trace_identity_check(std::string& detail) {
    const auto model = hadamard_model(Eigen::MatrixXcd::Ones(256, 128), Eigen::VectorXcd::Ones(128), 4242);
    double worst = 0.0;
    std::string per;
    for (double g : {1.0, 5.0, 20.0}) {
        const auto t = trace_identity(model, g);
        const double rel = std::abs(t.lhs - t.rhs) / t.rhs;
        worst = std::max(worst, rel);
        per += (per.empty() ? "" : ", ") + std::string("gamma ") + fmt(g) + ": " + fmt(rel);
    }
    detail = "l=256, ratio 0.5, one realization; relative errors " + per + " (tol 0.02)";
    return worst < 0.02;
}

bool multiuser_efficiency_check(std::string& detail) {
    // The high-SNR limit 1 - chi holds for equal sub-channel gains; faded gains are reported alongside.
    double worst = 0.0;
    std::string per, faded;
    CounterRng rng(606);
    for (double chi : {0.25, 0.5, 0.75}) {
        const std::size_t rows = 256, K = static_cast<std::size_t>(chi * rows);
        const auto r = multiuser_efficiency(
            identical_model(Eigen::VectorXcd::Constant(rows, 1.7), Eigen::VectorXcd::Ones(K), 607), 1e5);
        const double gap = std::abs(r.eta_users[0] - (1.0 - chi));
        worst = std::max(worst, gap);
        per += (per.empty() ? "" : ", ") + fmt(chi) + " -> " + fmt(r.eta_users[0], 6);
        Eigen::VectorXcd c(rows);
        for (auto& z : c) z = std::sqrt(rng.exponential());
        const auto f = multiuser_efficiency(identical_model(c, Eigen::VectorXcd::Ones(K), 607), 1e5);
        faded += (faded.empty() ? "" : ", ") + fmt(f.eta_users[0], 4);
    }
    detail = "fixed point at snr 1e5: " + per + "; worst gap " + fmt(worst) + " (tol 0.02); faded gains give " + faded;
    return worst < 0.02;
}

bool capacity_consistency(std::string& detail) {
    const std::size_t l = 64, K = 32;
    std::vector<double> rs{0.25, 0.5, 0.75, 1.0};
    const auto snrs = linspace(0.0, 20.0, 21);
    const auto rows = capacity_sweep(l, K, rs, snrs, 1);
    double forms = 0.0, own = 0.0;
    std::size_t mono = 0, zero_fail = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.snr == 0.0) {
            if (r.p_sym != 0.0) ++zero_fail;
        } else {
            forms = std::max(forms, std::abs(r.p_sym / r.long_form - 1.0));
            if (!(r.p_sym > rows[i - 1].p_sym)) ++mono;
        }
        if (i >= snrs.size() && !(r.p_sym >= rows[i - snrs.size()].p_sym)) ++mono;
    }
    {
        const auto prof = allocation_profile(l, K, 1.0, 1);
        const auto cap = p_sym_profile(prof, 0.5, 20.0);
        own = std::abs(cap.p_sym_interferer_ell / cap.long_form - 1.0);
    }

    // Identical allocation: eta integral against the eigenvalue Shannon sum.
    double ident = 0.0;
    CounterRng rng(808);
    Eigen::VectorXcd c(256), v(128);
    for (auto& z : c) z = std::sqrt(rng.exponential());
    for (auto& z : v) z = std::sqrt(rng.exponential());
    const auto model = identical_model(c, v, 809);
    const auto ev = eigenvalues_of_gram(model.compose());
    for (double s : {1.0, 5.0, 20.0}) {
        const double direct = nu_transform(ev, s) / 128.0;  // sum of log2(1 + s ev) / (rows K)
        ident = std::max(ident, std::abs(p_sym_s_sym(model, s).p_sym / direct - 1.0));
    }
    detail = "short vs long form worst " + fmt(forms) + " over " + std::to_string(rows.size()) +
             " sweep points (own-interferer variant differs by " + fmt(own) +
             " at snr 20); identical-allocation integral vs eigenvalue sum worst " + fmt(ident) +
             " at l=256; P_sym(0) nonzero " + std::to_string(zero_fail) + "; monotonicity violations " +
             std::to_string(mono);
    return forms < 0.01 && ident < 0.01 && zero_fail == 0 && mono == 0;
}

bool transform_calculus(std::string& detail) {
    double worst = 0.0;
    bool exact = true;
    for (std::uint64_t seed : {11u, 12u}) {
        const auto spec = empirical_spectrum(iid_matrix(512, 256, 1.0 / 512.0, seed)).sorted_sample;
        exact = exact && eta_transform(spec, 0.0) == 1.0 && nu_transform(spec, 0.0) == 0.0;
        for (double g : logspace(0.1, 100.0, 31)) {
            const double h = 1e-4 * g;
            const double dnu = (nu_transform(spec, g + h) - nu_transform(spec, g - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(dnu * std::numbers::ln2 / ((1.0 - eta_transform(spec, g)) / g) - 1.0));
        }
    }
    detail = "worst relative gap " + fmt(worst) + " on [0.1,100] (tol 0.01); eta(0)=1 and nu(0)=0 " +
             (exact ? "exact" : "NOT exact");
    return worst < 0.01 && exact;
}

bool reproducibility(std::string& detail) {
    const auto dir = std::filesystem::temp_directory_path() / "subchan_acceptance_repro";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"fig2", "fig2 n=32 l=8 trials=2000 thr_points=6 seed=3"},
        {"fig3", "fig3 points=9 seed=3"},
        {"fig4", "fig4 points=9 seed=3"},
        {"fig5", "fig5 l=32 K=16 snr_points=5 r_points=2 seed=3"},
        {"fig6", "fig6 chi=1 points=41 seed=3"},
        {"validate", "validate trials=2000 seed=42"},
        {"batch", "sweep kind=batch n=16 l=4 trials=200 seed=3"},
        {"histogram", "sweep kind=histogram n=16 l=4 trials=200 bins=10 seed=3"},
        {"transform", "sweep kind=transform K=32 chi=0.5 points=7 seed=3"},
        {"spectrum", "sweep kind=spectrum K=32 chi=0.5 seed=3"},
        {"density", "sweep kind=density n=6 l=3 which=top_sum points=11 seed=3"},
        {"vector", "sweep kind=vector n=16 seed=3"},
    };
    std::size_t same = 0;
    std::string bad;
    for (const auto& [name, args] : runs) {
        std::string first, second;
        bool ok = true;
        for (int rep = 0; rep < 2; ++rep) {
            const auto out = dir / (name + "_" + std::to_string(rep) + ".csv");
            const int rc = run_cli(args + " out=\"" + out.string() + "\"");
            ok = ok && rc == 0;
            (rep == 0 ? first : second) = slurp(out) + "\x1f" + slurp(out.string() + ".meta");
        }
        // The sidecar records the output path, which differs between the two runs.
        auto strip = [](std::string s) {
            const auto p = s.find("\nout=");
            if (p != std::string::npos) s.erase(p, s.find('\n', p + 1) - p);
            return s;
        };
        if (ok && !first.empty() && strip(first) == strip(second)) {
            ++same;
        } else {
            bad += " " + name;
        }
    }
    detail = std::to_string(same) + "/" + std::to_string(runs.size()) + " commands byte-identical across reruns" +
             (bad.empty() ? "" : "; differing or failing:" + bad);
    return same == runs.size();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-cli>\n";
        return 2;
    }
    cli_path = argv[1];
    criterion(1, order_statistics);
    criterion(2, mgf_consistency);
    criterion(3, selection_operators);
    criterion(4, error_probability);
    criterion(5, random_matrix_law);
    criterion(6, trace_identity_check);
    criterion(7, multiuser_efficiency_check);
    criterion(8, capacity_consistency);
    criterion(9, transform_calculus);
    criterion(10, reproducibility);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
