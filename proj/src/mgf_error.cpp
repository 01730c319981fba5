#include "subchan/mgf_error.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "subchan/errors.hpp"
#include "subchan/quadrature.hpp"

namespace subchan {

namespace {

constexpr double kPi = std::numbers::pi;

double central_difference(const MGFRepr& m, int k, double h) {
    switch (k) {
        case 1:
            return (m(h) - m(-h)) / (2.0 * h);
        case 2:
            return (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
        case 3:
            return (m(2 * h) - 2.0 * m(h) + 2.0 * m(-h) - m(-2 * h)) / (2.0 * h * h * h);
        default:
            return (m(2 * h) - 4.0 * m(h) + 6.0 * m(0.0) - 4.0 * m(-h) + m(-2 * h)) / (h * h * h * h);
    }
}

}  // namespace

double MGFRepr::operator()(double c) const {
    if (!(c > c_lo && c < c_hi) && c != 0.0) throw DomainError("MGF argument outside its convergence interval");
    return eval(c);
}

void ErrorRateSpec::validate() const {
    if (!(a > 0.0 && std::isfinite(a)) || !(b > 0.0 && std::isfinite(b)))
        throw ParameterError("error-rate constants must be finite and positive");
    if (!(snr_hat >= 0.0)) throw ParameterError("snr_hat must be nonnegative");
}

double mgf_from_pdf(const DistributionDescriptor& d, double c) {
    if (!d.pdf) throw ParameterError("descriptor has no density");
    auto f = [&](double x) { return d.pdf(x) * std::exp(c * x); };
    if (std::isfinite(d.hi)) return quad::integrate_gk(f, d.lo, d.hi, 1e-13, 1e-12);

    // Integrate over doubling pieces and watch the tail contributions; a
    // divergent integrand shows up as pieces that stop shrinking.
    // For c < 0 the mass sits within a few 1/|c| of lo.
    double scale = d.mean.value_or(1.0);
    if (c < 0.0) scale = std::min(scale, 1.0 / -c);
    double a = d.lo, b = d.lo + 8.0 * scale;
    double total = quad::integrate_gk(f, a, b, 1e-300, 1e-12);
    double prev_piece = std::abs(total);
    int growing = 0;
    for (int k = 0; k < 60; ++k) {
        a = b;
        b = d.lo + 2.0 * (b - d.lo);
        const double piece = quad::integrate_gk(f, a, b, 1e-16 * std::abs(total), 1e-12);
        if (!std::isfinite(piece) || !std::isfinite(total + piece))
            throw DomainError("MGF integral diverges");
        total += piece;
        if (std::abs(piece) <= 1e-15 * std::abs(total)) return total;
        growing = std::abs(piece) >= prev_piece ? growing + 1 : 0;
        if (growing >= 4) throw DomainError("MGF integral diverges");
        prev_piece = std::abs(piece);
    }
    throw DomainError("MGF integral did not settle");
}

MGFRepr mgf_of(const DistributionDescriptor& d) {
    MGFRepr m;
    if (d.family == Family::exponential) m.c_hi = 1.0 / *d.mean;
    m.eval = [d](double c) {
        if (c == 0.0) return 1.0;
        if (d.partial_mgf) return d.partial_mgf(c, d.lo, d.hi);
        return mgf_from_pdf(d, c);
    };
    return m;
}

MGFRepr point_mass_mgf(double at) {
    MGFRepr m;
    m.eval = [at](double c) { return std::exp(c * at); };
    return m;
}

double mgf_moment(const MGFRepr& m, int k) {
    if (k < 1 || k > 4) throw ParameterError("moment order must be 1..4");
    // Ridders' extrapolation: shrink h geometrically, eliminate the even-power
    // error terms, and keep the tableau entry with the smallest error estimate.
    constexpr int kLevels = 10;
    constexpr double kShrink = 1.4, kShrink2 = kShrink * kShrink;
    double h = 0.2;
    if (std::isfinite(m.c_hi)) h = std::min(h, 0.2 * m.c_hi);
    if (std::isfinite(m.c_lo)) h = std::min(h, -0.2 * m.c_lo);
    std::array<std::array<double, kLevels>, kLevels> a{};
    double best = 0.0, err = std::numeric_limits<double>::infinity();
    a[0][0] = central_difference(m, k, h);
    best = a[0][0];
    for (int i = 1; i < kLevels; ++i) {
        h /= kShrink;
        a[0][i] = central_difference(m, k, h);
        double fac = kShrink2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= kShrink2;
            const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = a[j][i];
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
    }
    return best;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_craig(double x, bool squared) {
    if (x < 0.0) throw ParameterError("Craig form needs x >= 0");
    if (x == 0.0) return squared ? 0.25 : 0.5;
    const double x2 = 0.5 * x * x;
    auto f = [x2](double phi) {
        const double s = std::sin(phi);
        return std::exp(-x2 / (s * s));
    };
    const double upper = squared ? kPi / 4.0 : kPi / 2.0;
    return quad::integrate_gk(f, 0.0, upper, 1e-15, 1e-13) / kPi;
}

double avg_error_rate(const ErrorRateSpec& spec, const MGFRepr& snr_mgf) {
    spec.validate();
    const double k = 0.5 * spec.b * spec.snr_hat;
    // 1 / sin^2(phi) = 1 + u^2 and dphi = -du / (1 + u^2).
    auto f = [&](double u) {
        const double w = 1.0 + u * u;
        return snr_mgf(-k * w) / w;
    };
    return spec.a / kPi * quad::integrate_gk(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14, 1e-12);
}

double avg_error_rate_phi(const ErrorRateSpec& spec, const MGFRepr& snr_mgf) {
    spec.validate();
    const double k = 0.5 * spec.b * spec.snr_hat;
    auto f = [&](double phi) {
        const double s = std::sin(phi);
        return snr_mgf(-k / (s * s));
    };
    return spec.a / kPi * quad::integrate_gk(f, 0.0, kPi / 2.0, 1e-14, 1e-12);
}

double avg_error_rate_direct(const ErrorRateSpec& spec, const DistributionDescriptor& gain) {
    spec.validate();
    auto f = [&](double x) { return q_function(std::sqrt(spec.b * spec.snr_hat * x)) * gain.pdf(x); };
    return spec.a * quad::integrate_gk(f, gain.lo, gain.hi, 1e-14, 1e-12);
}

double p_err_operator(const MGFRepr& op_mgf, double snr_hat) {
    if (!(snr_hat >= 0.0)) throw ParameterError("snr_hat must be nonnegative");
    if (snr_hat == 0.0) return 0.5;
    const double k = kErrorNumerator * snr_hat;
    auto f = [&](double u) {
        const double w = 1.0 + u * u;
        return op_mgf(-k * w) / w;
    };
    const double p = quad::integrate_gk(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14, 1e-12) / kPi;
    return std::clamp(p, 0.0, 0.5);
}

}  // namespace subchan
