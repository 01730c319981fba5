#include "subchan/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "subchan/csv.hpp"
#include "subchan/detail/numeric.hpp"
#include "subchan/errors.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/order_stats.hpp"
#include "subchan/quadrature.hpp"
#include "subchan/rng.hpp"

namespace subchan {

using detail::binom;
using detail::CompensatedSum;
using detail::ipow;
using detail::log_factorial;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gk(const auto& f, double a, double b) { return quad::integrate_gk(f, a, b, 1e-13, 1e-10); }

// n! / (a! b!) for a + b <= n, in floating point.
double multinomial(std::size_t n, std::size_t a, std::size_t b) {
    return std::exp(log_factorial(n) - log_factorial(a) - log_factorial(b));
}

std::vector<std::size_t> scan_order(std::size_t n, const ScanOptions& opt) {
    std::vector<std::size_t> order(n);
    if (!opt.order.empty()) {
        if (opt.order.size() != n) throw ParameterError("scan order must list every sub-channel once");
        std::vector<bool> seen(n, false);
        for (auto i : opt.order) {
            if (i >= n || seen[i]) throw ParameterError("scan order must be a permutation");
            seen[i] = true;
        }
        return opt.order;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (opt.shuffle_seed) {
        CounterRng rng(*opt.shuffle_seed);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    return order;
}

// P(at least l of n clear a threshold that each clears with probability p).
double tail_at_least(std::size_t n, std::size_t l, double p) {
    CompensatedSum s;
    for (std::size_t h = l; h <= n; ++h) s += binom(n, h) * ipow(p, h) * ipow(1.0 - p, n - h);
    return std::clamp(s.value(), 0.0, 1.0);
}

double erlang_cdf(std::size_t k, double z) {
    if (z <= 0.0) return 0.0;
    // 1 - e^{-z} sum_{j<k} z^j / j!
    CompensatedSum s;
    double term = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
        s += term;
        term *= z / static_cast<double>(j + 1);
    }
    return std::clamp(1.0 - std::exp(-z) * s.value(), 0.0, 1.0);
}

double fallback_mgf(std::size_t n, std::size_t l, const DistributionDescriptor& b, double mu, double x) {
    if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must lie in (0, 1)");
    const auto nd = static_cast<double>(n);
    if (l == 1) {
        return gk([&](double y) { return nd * ipow(clamped_cdf(b, y), n - 1) * b.pdf(y) * std::exp(x * y); }, b.lo,
                  b.hi);
    }
    // The maximum y0 always qualifies. Of the other n - 1 values, those in
    // [mu y0, y0] qualify; all of them are taken when fewer than l - 1 qualify,
    // otherwise the top l - 1, whose smallest member sits at y.
    const double top_coef = multinomial(n - 1, l - 2, n - l);
    auto outer = [&](double y0) {
        const double p0 = b.pdf(y0);
        if (p0 == 0.0) return 0.0;
        const double cut = mu * y0;
        const double band = partial_mgf(b, x, cut, y0);
        const double below = clamped_cdf(b, cut);
        CompensatedSum s;
        for (std::size_t h = 0; h + 2 <= l; ++h) s += binom(n - 1, h) * ipow(band, h) * ipow(below, n - 1 - h);
        if (n >= l) {
            auto inner = [&](double y) {
                return b.pdf(y) * std::exp(x * y) * ipow(clamped_cdf(b, y), n - l) *
                       ipow(partial_mgf(b, x, y, y0), l - 2);
            };
            s += top_coef * gk(inner, cut, y0);
        }
        return nd * p0 * std::exp(x * y0) * s.value();
    };
    return gk(outer, b.lo, b.hi);
}

}  // namespace

void OperatorKind::validate() const {
    if (op == Operator::lambda_prime && rule != ThresholdRule::fixed)
        throw ParameterError("the top-up operator needs a fixed threshold");
}

std::string operator_name(Operator op) {
    switch (op) {
        case Operator::lambda0:
            return "lambda0";
        case Operator::lambda:
            return "lambda";
        case Operator::lambda_prime:
            return "lambda_prime";
    }
    return "?";
}

SelectionOutcome run_operator(const OperatorKind& kind, std::span<const double> mags, std::size_t l,
                              const Threshold& thr, const ScanOptions& opt) {
    kind.validate();
    const std::size_t n = mags.size();
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (!opt.FT.empty() && opt.FT.size() != n) throw ParameterError("FT length must match the magnitudes");

    SelectionOutcome out;
    out.threshold_used = kind.rule == ThresholdRule::fallback ? fallback_threshold(mags, thr.mu, l) : thr;
    const double t = out.threshold_used.t_star_sq;
    std::size_t cmp = 0;
    auto desc = [&](std::size_t a, std::size_t b) {
        ++cmp;
        if (mags[a] != mags[b]) return mags[a] > mags[b];
        return a < b;
    };

    if (kind.op == Operator::lambda0) {
        for (std::size_t i = 0; i < n; ++i) (mags[i] >= t ? out.good_set : out.bad_set).push_back(i);
        out.iterations = n;
        std::vector<std::size_t> ranked = out.good_set;
        std::sort(ranked.begin(), ranked.end(), desc);
        ranked.resize(std::min(l, ranked.size()));
        out.selected = std::move(ranked);
    } else {
        for (auto i : scan_order(n, opt)) {
            ++out.iterations;
            if (mags[i] >= t) {
                out.good_set.push_back(i);
                if (out.good_set.size() == l) break;
            } else {
                out.bad_set.push_back(i);
            }
        }
        out.selected = out.good_set;
        if (kind.op == Operator::lambda_prime && out.selected.size() < l) {
            std::vector<std::size_t> bad = out.bad_set;
            std::sort(bad.begin(), bad.end(), desc);
            bad.resize(l - out.selected.size());
            std::vector<double> topped;
            for (auto i : bad) topped.push_back(mags[i]);
            out.threshold_used = lambda_prime_threshold(out.threshold_used, topped);
            out.selected.insert(out.selected.end(), bad.begin(), bad.end());
        }
        std::sort(out.selected.begin(), out.selected.end(), desc);
    }
    out.comparisons = cmp;

    for (auto i : out.selected) out.gain_sum += mags[i];
    if (!out.selected.empty()) {
        out.A_j_sq = out.gain_sum / static_cast<double>(out.selected.size());
        out.A_j = opt.FT.empty() ? cplx{std::sqrt(out.A_j_sq), 0.0} : single_carrier_coefficient(opt.FT, out.selected);
    }
    return out;
}

double prob_select(SelectProb kind, std::size_t n, std::size_t l, std::size_t k, const DistributionDescriptor& base,
                   double thr, double mu) {
    if (k > n) throw ParameterError("k must not exceed n");
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    const double f = clamped_cdf(base, thr), p = 1.0 - f;
    switch (kind) {
        case SelectProb::exact_l_fixed:
            return binom(n, l) * ipow(p, l) * ipow(f, n - l);
        case SelectProb::at_least_l:
            return tail_at_least(n, l, p);
        case SelectProb::exactly_k_short:
            return binom(n, k) * ipow(p, k) * ipow(f, n - k);
        case SelectProb::exact_k_fallback:
            break;
    }
    if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must lie in (0, 1)");
    if (k == 0) return 0.0;  // the maximum always clears mu times itself
    const auto& b = base;
    const auto nd = static_cast<double>(n);
    if (n == 1) return 1.0;
    if (k == 1) {
        // Second largest z below mu x.
        auto outer = [&](double x) {
            auto inner = [&](double z) { return (nd - 1.0) * b.pdf(z) * ipow(clamped_cdf(b, z), n - 2); };
            return nd * b.pdf(x) * gk(inner, b.lo, mu * x);
        };
        return std::clamp(gk(outer, b.lo, b.hi), 0.0, 1.0);
    }
    if (k == n) {
        // Smallest y at or above mu x.
        auto outer = [&](double x) {
            const double Fx = clamped_cdf(b, x);
            auto inner = [&](double y) {
                return (nd - 1.0) * b.pdf(y) * ipow(Fx - clamped_cdf(b, y), n - 2);
            };
            return nd * b.pdf(x) * gk(inner, mu * x, x);
        };
        return std::clamp(gk(outer, b.lo, b.hi), 0.0, 1.0);
    }
    // Largest x, k-th largest y in [mu x, x], (k+1)-th largest z in [0, mu x].
    const double coef = multinomial(n, k - 2, n - k - 1);
    auto outer = [&](double x) {
        const double px = b.pdf(x);
        if (px == 0.0) return 0.0;
        const double Fx = clamped_cdf(b, x);
        auto mid = [&](double y) {
            const double gap = ipow(Fx - clamped_cdf(b, y), k - 2) * b.pdf(y);
            if (gap == 0.0) return 0.0;
            auto inner = [&](double z) { return b.pdf(z) * ipow(clamped_cdf(b, z), n - k - 1); };
            return gap * gk(inner, b.lo, mu * x);
        };
        return px * gk(mid, mu * x, x);
    };
    return std::clamp(coef * gk(outer, b.lo, b.hi), 0.0, 1.0);
}

double kappa_analytic(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                      double thr) {
    kind.validate();
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (kind.rule != ThresholdRule::fixed) throw UnsupportedModeError("closed-form kappa assumes a fixed threshold");
    const double f = clamped_cdf(base, thr), p = 1.0 - f;
    const auto nd = static_cast<double>(n);
    CompensatedSum s;
    // Added cost of the re-scan terms: n + sum_{k=1}^{l-i} (n - i - k).
    auto rescan = [&](std::size_t i) {
        double c = nd;
        for (std::size_t k = 1; k + i <= l; ++k) c += nd - static_cast<double>(i + k);
        return c;
    };
    switch (kind.op) {
        case Operator::lambda0:
            for (std::size_t i = 1; i <= l; ++i) s += binom(n, i) * ipow(p, i) * ipow(f, n - i) * rescan(i);
            break;
        case Operator::lambda:
            for (std::size_t i = l; i <= n; ++i)
                s += static_cast<double>(i) * ipow(p, l) * binom(i - 1, i - l) * ipow(f, i - l);
            for (std::size_t i = n - l + 1; i <= n; ++i) s += nd * binom(n, i) * ipow(p, i) * ipow(f, n - i);
            break;
        case Operator::lambda_prime:
            for (std::size_t i = l; i <= n; ++i)
                s += static_cast<double>(i) * binom(i - 1, i - l) * ipow(p, l) * ipow(f, i - l);
            for (std::size_t k = 0; k < l; ++k) {
                double c = nd;
                for (std::size_t i = 1; i + k <= l; ++i) c += nd - static_cast<double>(k + i);
                s += c * binom(n, k) * ipow(f, n - k) * ipow(p, k);
            }
            break;
    }
    return s.value();
}

double kappa_exact(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                   double thr) {
    kind.validate();
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    const auto nd = static_cast<double>(n);
    if (kind.op == Operator::lambda0) return nd;
    if (kind.rule != ThresholdRule::fixed)
        throw UnsupportedModeError("progressive kappa under the fallback rule depends on the unseen maximum");
    const double f = clamped_cdf(base, thr), p = 1.0 - f;
    // Stop at the l-th success (negative binomial), or after all n on shortfall.
    CompensatedSum s;
    for (std::size_t i = l; i <= n; ++i)
        s += static_cast<double>(i) * binom(i - 1, l - 1) * ipow(p, l) * ipow(f, i - l);
    s += nd * (1.0 - tail_at_least(n, l, p));
    return s.value();
}

KappaReport kappa_report(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                         double thr, std::size_t trials, std::uint64_t seed) {
    KappaReport r;
    r.analytic = kappa_analytic(kind, n, l, base, thr);
    r.exact = kappa_exact(kind, n, l, base, thr);
    const Threshold t = Threshold::at(thr, l);
    TrialPlan plan{trials, seed, 1};
    const auto agg = run_trials(plan, [&](std::uint64_t s, std::size_t) {
        CounterRng rng(s);
        std::vector<double> mags(n);
        for (auto& m : mags) m = sample_from(base, rng);
        return static_cast<double>(run_operator(kind, mags, l, t).iterations);
    });
    r.empirical = agg.mean;
    r.std_error = agg.std_error;
    auto gap = [&](double v) { return std::abs(v - r.empirical) > 0.05 * std::abs(r.empirical); };
    r.analytic_flagged = gap(r.analytic);
    r.exact_flagged = gap(r.exact);
    return r;
}

double censored_channel_mgf(const DistributionDescriptor& base, double thr, double x) {
    return clamped_cdf(base, thr) + partial_mgf(base, x, std::max(thr, base.lo), base.hi);
}

double censored_product_mgf(std::size_t l, const DistributionDescriptor& base, double thr, double x) {
    return ipow(censored_channel_mgf(base, thr, x), l);
}

double operator_mgf(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                    double thr, double mu, double x) {
    kind.validate();
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (x == 0.0) return 1.0;
    const auto& b = base;
    if (kind.rule == ThresholdRule::fallback) {
        if (kind.op != Operator::lambda0)
            throw UnsupportedModeError("progressive operators have no closed MGF under the fallback rule");
        return fallback_mgf(n, l, b, mu, x);
    }
    const double t = std::clamp(thr, b.lo, b.hi);
    const double F = clamped_cdf(b, t);
    const double above = partial_mgf(b, x, t, b.hi);  // integral of pdf e^{xz} over [t, hi]

    // Fewer than l qualify: every qualifying channel is taken. These terms are
    // shared by all three operators except for the top-up factor.
    auto shortfall_terms = [&](auto&& topup) {
        CompensatedSum s;
        for (std::size_t h = 0; h < l; ++h) {
            const double w = binom(n, h) * ipow(F, n - h) * ipow(above, h);
            if (w != 0.0) s += w * topup(h);
        }
        return s.value();
    };

    switch (kind.op) {
        case Operator::lambda0: {
            const double coef = multinomial(n, l - 1, n - l);
            auto f = [&](double y) {
                const double p = b.pdf(y);
                if (p == 0.0) return 0.0;
                return ipow(clamped_cdf(b, y), n - l) * p * std::exp(x * y) * ipow(partial_mgf(b, x, y, b.hi), l - 1);
            };
            return shortfall_terms([](std::size_t) { return 1.0; }) + coef * gk(f, t, b.hi);
        }
        case Operator::lambda: {
            const double p = 1.0 - F;
            if (p <= 0.0) return 1.0;
            return shortfall_terms([](std::size_t) { return 1.0; }) + tail_at_least(n, l, p) * ipow(above / p, l);
        }
        case Operator::lambda_prime: {
            const double p = 1.0 - F;
            auto topup = [&](std::size_t h) {
                // Top q of the r = n - h bad values, i.i.d. from the base
                // restricted to [lo, t].
                const std::size_t q = l - h, r = n - h;
                const double coef = multinomial(r, q - 1, r - q);
                auto f = [&](double y) {
                    const double py = b.pdf(y);
                    if (py == 0.0) return 0.0;
                    return ipow(clamped_cdf(b, y) / F, r - q) * (py / F) * std::exp(x * y) *
                           ipow(partial_mgf(b, x, y, t) / F, q - 1);
                };
                return coef * gk(f, b.lo, t);
            };
            const double good = p > 0.0 ? tail_at_least(n, l, p) * ipow(above / p, l) : 0.0;
            return shortfall_terms(topup) + good;
        }
    }
    return 0.0;
}

MGFRepr operator_mgf_repr(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                          double thr, double mu) {
    MGFRepr m;
    if (base.family == Family::exponential) m.c_hi = 1.0 / *base.mean;
    m.eval = [=](double x) { return operator_mgf(kind, n, l, base, thr, mu, x); };
    return m;
}

double lambda_prime_cdf(std::size_t n, std::size_t l, const DistributionDescriptor& base, double thr, double x) {
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (base.family != Family::exponential) throw UnsupportedModeError("closed-form CDF needs the exponential base");
    if (x <= 0.0) return 0.0;
    const double m = *base.mean, t = std::max(thr, 0.0);
    const double F = clamped_cdf(base, t);
    const double enough = tail_at_least(n, l, 1.0 - F);
    const auto ld = static_cast<double>(l);

    // At least l qualify: each pick is t plus an exponential, so the sum is
    // l t plus an Erlang(l) variable.
    const double upper = x >= t ? enough * erlang_cdf(l, ld * (x - t) / m) : 0.0;

    double lower;
    if (l == 1) {
        lower = ipow(clamped_cdf(base, std::min(x, t)), n);
    } else {
        // Shortfall: the top l of n are taken and the l-th largest g2 is below
        // t. Given g2, the l - 1 values above it are g2 plus i.i.d.
        // exponentials, so their sum exceeds (l - 1) g2 by an Erlang(l - 1).
        const double S = ld * x;
        auto outer = [&](double g2) {
            return exp_lth_largest_pdf(n, l, m, g2) * erlang_cdf(l - 1, (S - ld * g2) / m);
        };
        lower = quad::integrate_gk(outer, 0.0, std::min(t, x), 1e-14, 1e-12);
    }
    return std::clamp(upper + lower, 0.0, 1.0);
}

void write_batch_csv(std::ostream& os, std::span<const BatchRecord> records) {
    CsvWriter w(os, {"trial", "operator", "iterations", "a_j_sq", "selected_count"});
    for (const auto& r : records) w.row(r.trial, operator_name(r.op), r.iterations, r.a_j_sq, r.selected_count);
}

}  // namespace subchan
