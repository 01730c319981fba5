#include "subchan/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "subchan/errors.hpp"
#include "subchan/quadrature.hpp"

namespace subchan {

DistributionDescriptor exponential_law(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ParameterError("exponential mean must be positive");
    DistributionDescriptor d;
    d.pdf = [mean](double x) { return x < 0.0 ? 0.0 : std::exp(-x / mean) / mean; };
    d.cdf = [mean](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x / mean); };
    d.mean = mean;
    d.family = Family::exponential;
    d.partial_mgf = [mean](double c, double a, double b) {
        a = std::max(a, 0.0);
        if (!(b > a)) return 0.0;
        const double r = c - 1.0 / mean;  // exponent rate of pdf(z) e^{cz}
        if (std::isinf(b) && r >= 0.0) throw DomainError("exponential MGF diverges at c >= 1/mean");
        if (std::abs(r) * (std::isinf(b) ? 1.0 : (b - a)) < 1e-12) return (b - a) / mean;
        // (e^{rb} - e^{ra}) / (r mean), written to stay accurate for small r(b-a).
        const double ea = std::exp(r * a);
        if (std::isinf(b)) return -ea / (r * mean);
        return ea * std::expm1(r * (b - a)) / (r * mean);
    };
    return d;
}

DistributionDescriptor gamma_law(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw ParameterError("gamma shape and scale must be positive");
    DistributionDescriptor d;
    const double log_norm = std::lgamma(shape) + shape * std::log(scale);
    d.pdf = [shape, scale, log_norm](double x) {
        if (x < 0.0) return 0.0;
        if (x == 0.0) return shape == 1.0 ? 1.0 / scale : (shape < 1.0 ? INFINITY : 0.0);
        return std::exp((shape - 1.0) * std::log(x) - x / scale - log_norm);
    };
    d.cdf = [shape, scale, pdf = d.pdf](double x) {
        if (x <= 0.0) return 0.0;
        // Lower regularized gamma by series / continued fraction.
        const double z = x / scale;
        const double gln = std::lgamma(shape);
        if (z < shape + 1.0) {
            double ap = shape, del = 1.0 / shape, sum = del;
            for (int i = 0; i < 1000; ++i) {
                ap += 1.0;
                del *= z / ap;
                sum += del;
                if (std::abs(del) < std::abs(sum) * 1e-16) break;
            }
            return sum * std::exp(-z + shape * std::log(z) - gln);
        }
        double b = z + 1.0 - shape, c = 1.0 / 1e-300, dd = 1.0 / b, h = dd;
        for (int i = 1; i < 1000; ++i) {
            const double an = -i * (i - shape);
            b += 2.0;
            dd = an * dd + b;
            if (std::abs(dd) < 1e-300) dd = 1e-300;
            c = b + an / c;
            if (std::abs(c) < 1e-300) c = 1e-300;
            dd = 1.0 / dd;
            const double del = dd * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) break;
        }
        return 1.0 - std::exp(-z + shape * std::log(z) - gln) * h;
    };
    d.mean = shape * scale;
    return d;
}

void validate_descriptor(const DistributionDescriptor& d) {
    if (!d.pdf || !d.cdf) throw ParameterError("descriptor needs pdf and cdf");
    if (!(d.hi > d.lo)) throw ParameterError("descriptor support is empty");
    if (std::abs(d.cdf(d.lo)) > 1e-9) throw ParameterError("cdf(lo) must be 0");
    const double top = std::isinf(d.hi) ? d.cdf(1e300) : d.cdf(d.hi);
    if (std::abs(top - 1.0) > 1e-9) throw ParameterError("cdf(hi) must be 1");
    const double mass = quad::integrate_gk(d.pdf, d.lo, d.hi, 1e-10, 1e-10);
    if (std::abs(mass - 1.0) > 1e-6) throw ParameterError("pdf does not integrate to 1");
}

double partial_mgf(const DistributionDescriptor& d, double c, double a, double b) {
    a = std::max(a, d.lo);
    b = std::min(b, d.hi);
    if (!(b > a)) return 0.0;
    if (d.partial_mgf) return d.partial_mgf(c, a, b);
    auto f = [&](double z) { return d.pdf(z) * std::exp(c * z); };
    if (c >= 0.0 || b - a <= 8.0 / -c) return quad::integrate_gk(f, a, b, 1e-13, 1e-12);
    // Strong decay: the mass sits near a, so widen the pieces geometrically.
    double lo = a, hi = a + 8.0 / -c, total = 0.0;
    for (;;) {
        const double piece = quad::integrate_gk(f, lo, hi, 1e-300, 1e-12);
        total += piece;
        if (hi >= b || std::abs(piece) <= 1e-16 * std::abs(total)) return total;
        lo = hi;
        hi = std::min(b, a + 2.0 * (hi - a));
    }
}

double clamped_cdf(const DistributionDescriptor& d, double x) {
    if (x <= d.lo) return 0.0;
    if (x >= d.hi) return 1.0;
    return std::clamp(d.cdf(x), 0.0, 1.0);
}

}  // namespace subchan
