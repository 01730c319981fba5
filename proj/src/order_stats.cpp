#include "subchan/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "subchan/csv.hpp"
#include "subchan/detail/numeric.hpp"
#include "subchan/errors.hpp"
#include "subchan/quadrature.hpp"

namespace subchan {

using detail::binom;
using detail::CompensatedSum;
using detail::factorial;
using detail::ipow;
using detail::log_factorial;

namespace {

double log_order_coefficient(std::size_t pop, std::size_t r) {
    return log_factorial(pop) - log_factorial(r - 1) - log_factorial(pop - r);
}

// Density of the sum of `count` i.i.d. draws from base restricted to [y, inf).
double truncated_sum_pdf(const DistributionDescriptor& base, std::size_t count, double y, double u) {
    const double tail = 1.0 - clamped_cdf(base, y);
    if (!(tail > 0.0)) throw SingularityError("conditioning value at the top of the support");
    if (u < static_cast<double>(count) * y) return 0.0;
    if (count == 1) return base.pdf(u) / tail;
    const double upper = u - static_cast<double>(count - 1) * y;
    return quad::integrate_gk(
        [&](double z) { return base.pdf(z) / tail * truncated_sum_pdf(base, count - 1, y, u - z); }, y, upper,
        1e-12, 1e-9);
}

}  // namespace

void OrderedEnsemble::validate() const {
    if (l == 0 || l > n) throw ParameterError("ordered ensemble needs 1 <= l <= n");
    if (!base.pdf || !base.cdf) throw ParameterError("ordered ensemble needs a base law");
}

double order_statistic_pdf(const DistributionDescriptor& base, std::size_t pop, std::size_t r, double x) {
    if (r == 0 || r > pop) throw ParameterError("order index out of range");
    if (x < base.lo || x > base.hi) return 0.0;
    const double p = base.pdf(x);
    if (p == 0.0) return 0.0;
    const double F = clamped_cdf(base, x);
    const double lower = ipow(F, pop - r), upper = ipow(1.0 - F, r - 1);
    if (lower == 0.0 || upper == 0.0) return 0.0;
    return std::exp(log_order_coefficient(pop, r)) * lower * upper * p;
}

double order_statistic_cdf(const DistributionDescriptor& base, std::size_t pop, std::size_t r, double x) {
    if (r == 0 || r > pop) throw ParameterError("order index out of range");
    const double F = clamped_cdf(base, x);
    if (F <= 0.0) return 0.0;
    if (F >= 1.0) return 1.0;
    // At most r-1 of the pop draws exceed x.
    const double lf = std::log(F), ls = std::log1p(-F);
    CompensatedSum s;
    for (std::size_t j = 0; j < r; ++j) {
        const double lb = log_factorial(pop) - log_factorial(j) - log_factorial(pop - j);
        s += std::exp(lb + static_cast<double>(j) * ls + static_cast<double>(pop - j) * lf);
    }
    return std::clamp(s.value(), 0.0, 1.0);
}

double ordered_pdf(const OrderedEnsemble& ens, std::size_t i, double x) {
    ens.validate();
    if (i == 0 || i > ens.l) throw ParameterError("order index out of range");
    return order_statistic_pdf(ens.base, ens.l, i, x);
}

double ordered_cdf(const OrderedEnsemble& ens, std::size_t i, double x) {
    ens.validate();
    if (i == 0 || i > ens.l) throw ParameterError("order index out of range");
    return order_statistic_cdf(ens.base, ens.l, i, x);
}

double joint_pdf_pair(const OrderedEnsemble& ens, std::size_t k, std::size_t m, double x, double y) {
    ens.validate();
    const std::size_t l = ens.l;
    if (k == 0 || m <= k || m > l) throw ParameterError("pair indices need 1 <= k < m <= l");
    if (x < y) return 0.0;
    const auto& b = ens.base;
    const double Fx = clamped_cdf(b, x), Fy = clamped_cdf(b, y);
    const double coef = factorial(l) / (factorial(k - 1) * factorial(m - k - 1) * factorial(l - m));
    return coef * ipow(1.0 - Fx, k - 1) * b.pdf(x) * ipow(Fx - Fy, m - k - 1) * b.pdf(y) * ipow(Fy, l - m);
}

double joint_pdf_all(const OrderedEnsemble& ens, std::span<const double> point) {
    ens.validate();
    if (point.size() != ens.l) throw ParameterError("point must have l coordinates");
    double prod = factorial(ens.l);
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i > 0 && point[i] > point[i - 1]) return 0.0;
        prod *= ens.base.pdf(point[i]);
    }
    return prod;
}

double joint_pdf_selected(const OrderedEnsemble& ens, std::span<const double> point) {
    ens.validate();
    if (point.size() != ens.l) throw ParameterError("point must have l coordinates");
    double prod = std::exp(log_factorial(ens.n) - log_factorial(ens.n - ens.l));
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i > 0 && point[i] > point[i - 1]) return 0.0;
        prod *= ens.base.pdf(point[i]);
    }
    return prod * ipow(clamped_cdf(ens.base, point.back()), ens.n - ens.l);
}

double joint_pdf(const OrderedEnsemble& ens, JointMode mode, std::span<const double> point, std::size_t k,
                 std::size_t m) {
    switch (mode) {
        case JointMode::pair:
            if (point.size() != 2) throw ParameterError("pair mode takes a two-point argument");
            return joint_pdf_pair(ens, k, m, point[0], point[1]);
        case JointMode::all_ordered:
            return joint_pdf_all(ens, point);
        case JointMode::selected_from_n:
            return joint_pdf_selected(ens, point);
    }
    return 0.0;
}

double conditional_pdf(const OrderedEnsemble& ens, std::size_t m, std::size_t i, double y, double x) {
    ens.validate();
    const std::size_t l = ens.l;
    if (i == 0 || m <= i || m > l) throw ParameterError("conditional indices need 1 <= i < m <= l");
    if (x > y || x < ens.base.lo) return 0.0;
    const double Fy = clamped_cdf(ens.base, y);
    if (!(Fy > 0.0)) throw SingularityError("conditioning value at the bottom of the support");
    // Below y the remaining l-i values are i.i.d. from the base restricted to
    // [lo, y]; the m-th overall is the (m-i)-th largest of those.
    const double G = clamped_cdf(ens.base, x) / Fy;
    const double coef = factorial(l - i) / (factorial(m - i - 1) * factorial(l - m));
    return coef * ipow(G, l - m) * ipow(1.0 - G, m - i - 1) * ens.base.pdf(x) / Fy;
}

double residual_pdf(const DistributionDescriptor& base, double y, double x) {
    const double tail = 1.0 - clamped_cdf(base, y);
    if (!(tail > 0.0)) throw SingularityError("residual density undefined: cdf(y) = 1");
    if (x < y) return 0.0;
    return base.pdf(x) / tail;
}

double upper_sum_conditional_pdf(const OrderedEnsemble& ens, double y, double u) {
    ens.validate();
    if (ens.l < 2) throw ParameterError("upper sum is empty for l = 1");
    if (ens.base.family == Family::exponential)
        return exp_upper_sum_conditional_pdf(ens.l, *ens.base.mean, y, u);
    return truncated_sum_pdf(ens.base, ens.l - 1, y, u);
}

double partial_sum_pdf(const OrderedEnsemble& ens, double x) {
    ens.validate();
    if (x < 0.0) return 0.0;
    if (ens.l == 1) return order_statistic_pdf(ens.base, ens.n, 1, x);
    const double top = std::min(x / static_cast<double>(ens.l), ens.base.hi);
    if (!(top > ens.base.lo)) return 0.0;
    auto integrand = [&](double y) {
        const double g2 = order_statistic_pdf(ens.base, ens.n, ens.l, y);
        if (g2 == 0.0) return 0.0;
        return g2 * upper_sum_conditional_pdf(ens, y, x - y);
    };
    quad::Options opt;
    opt.abs_tol = 1e-11;
    return quad::integrate(integrand, ens.base.lo, top, opt);
}

double truncated_exp_pdf(double mean, double upper, double x) {
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (!(upper > 0.0)) throw ParameterError("truncation point must be positive");
    if (x <= 0.0 || x >= upper) return 0.0;
    const double mass = std::isinf(upper) ? 1.0 : -std::expm1(-upper / mean);
    return std::exp(-x / mean) / (mean * mass);
}

double band_exp_pdf(double mean, double lower, double upper, double x) {
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (!(lower >= 0.0 && lower < upper)) throw ParameterError("band needs 0 <= lower < upper");
    if (x < lower || x > upper) return 0.0;
    const double mass = std::exp(-lower / mean) - std::exp(-upper / mean);
    return std::exp(-x / mean) / (mean * mass);
}

double band_exp_mgf(double mean, double lower, double upper, double w) {
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (!(lower >= 0.0 && lower < upper)) throw ParameterError("band needs 0 <= lower < upper");
    const double mass = std::exp(-lower / mean) - std::exp(-upper / mean);
    const double r = w - 1.0 / mean;
    if (std::isinf(upper)) {
        if (r >= 0.0) throw DomainError("band MGF diverges");
        return -std::exp(r * lower) / (r * mean * mass);
    }
    const double width = upper - lower;
    if (std::abs(r * width) < 1e-14) return width * std::exp(r * lower) / (mean * mass);
    return std::exp(r * lower) * std::expm1(r * width) / (r * mean * mass);
}

double top_sum_term_mgf(std::size_t k, std::size_t l, double mean, double w) {
    if (k == 0 || l == 0) throw ParameterError("term index and l must be positive");
    const double weight = static_cast<double>(std::min(k, l)) / static_cast<double>(k);
    const double z = w * mean * weight;
    if (z >= 1.0) throw DomainError("top-sum MGF diverges");
    return 1.0 / (1.0 - z);
}

double top_sum_mgf(std::size_t n, std::size_t l, double mean, double w) {
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (w * mean >= 1.0) throw DomainError("top-sum MGF diverges for w * mean >= 1");
    double prod = std::pow(1.0 - w * mean, -static_cast<double>(l));
    for (std::size_t k = l + 1; k <= n; ++k) prod *= top_sum_term_mgf(k, l, mean, w);
    return prod;
}

FlaggedValue top_sum_pdf(std::size_t n, std::size_t l, double mean, double x, double rel_bound) {
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (x < 0.0) return {};
    const double ld = static_cast<double>(l);
    CompensatedSum s;
    s += ipow(x, l - 1) / (std::pow(mean, ld) * factorial(l - 1));
    for (std::size_t k = 1; k + l <= n; ++k) {
        const double z = static_cast<double>(k) * x / (ld * mean);
        // e^{-z} minus its first l-1 Taylor terms; the series tail is used for
        // small z where the difference cancels.
        double inner;
        if (z < 1.0) {
            CompensatedSum tail;
            double term = ipow(-z, l - 1) / factorial(l - 1);
            for (std::size_t j = l - 1; j < l + 60 && term != 0.0; ++j) {
                tail += term;
                term *= -z / static_cast<double>(j + 1);
            }
            inner = tail.value();
        } else {
            CompensatedSum poly;
            double term = 1.0;
            for (std::size_t j = 0; j + 2 <= l; ++j) {
                poly += term;
                term *= -z / static_cast<double>(j + 1);
            }
            inner = std::exp(-z) - poly.value();
        }
        const double sign = ((l + k - 1) % 2 == 0) ? 1.0 : -1.0;
        s += sign * binom(n - l, k) * std::pow(ld / static_cast<double>(k), ld - 1.0) * inner / mean;
    }
    const double scale = binom(n, l) * std::exp(-x / mean);
    FlaggedValue out{scale * s.value(), false};
    const double err = scale * s.max_term() * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    if (err > rel_bound * std::abs(out.value) || out.value < 0.0) {
        OrderedEnsemble ens{l, n, exponential_law(mean)};
        out.value = partial_sum_pdf(ens, x);
        out.fallback = true;
    }
    return out;
}

double exp_residual_pdf(double mean, double x, double y) {
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (x < y) return 0.0;
    return std::exp(-(x - y) / mean) / mean;
}

double exp_upper_sum_conditional_pdf(std::size_t l, double mean, double g2, double g1) {
    if (l < 2) throw ParameterError("upper sum needs l >= 2");
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    const double v = g1 - static_cast<double>(l - 1) * g2;
    if (g2 < 0.0 || v < 0.0) return 0.0;
    return ipow(v, l - 2) * std::exp(-v / mean) / (factorial(l - 2) * std::pow(mean, static_cast<double>(l - 1)));
}

double exp_lth_largest_pdf(std::size_t n, std::size_t l, double mean, double g2) {
    if (l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    if (g2 < 0.0) return 0.0;
    // The expanded sum over h alternates and cancels near zero; (1 - e^{-g})^{n-l}
    // is its unexpanded form.
    const double z = g2 / mean;
    return factorial(n) / (mean * factorial(l - 1) * factorial(n - l)) * std::exp(-static_cast<double>(l) * z) *
           ipow(-std::expm1(-z), n - l);
}

double exp_lth_largest_upper_sum_pdf(std::size_t n, std::size_t l, double mean, double g2, double g1) {
    if (l < 2 || l > n) throw ParameterError("need 2 <= l <= n");
    if (!(mean > 0.0)) throw ParameterError("mean must be positive");
    const double v = g1 - static_cast<double>(l - 1) * g2;
    if (g2 < 0.0 || v < 0.0) return 0.0;
    CompensatedSum s;
    for (std::size_t h = 0; h + l <= n; ++h) {
        const double sign = h % 2 == 0 ? 1.0 : -1.0;
        s += sign / (factorial(n - l - h) * factorial(h)) *
             std::exp(-(g1 + static_cast<double>(h + 1) * g2) / mean);
    }
    const double coef =
        factorial(n) / (factorial(l - 1) * factorial(l - 2) * std::pow(mean, static_cast<double>(l)));
    return coef * ipow(v, l - 2) * s.value();
}

void write_density_csv(std::ostream& os, std::span<const double> grid, const std::function<double(double)>& pdf) {
    CsvWriter w(os, {"x", "pdf"});
    for (double x : grid) w.row(x, pdf(x));
}

}  // namespace subchan
