#pragma once

#include <functional>
#include <limits>

#include "subchan/distribution.hpp"

namespace subchan {

// Moment-generating function c -> E[e^{cX}] on (c_lo, c_hi).
struct MGFRepr {
    std::function<double(double)> eval;
    double c_lo = -std::numeric_limits<double>::infinity();
    double c_hi = std::numeric_limits<double>::infinity();

    double operator()(double c) const;
};

// Error rate a Q(sqrt(b SNR)) averaged over SNR = snr_hat * G, where the MGF
// handed to avg_error_rate is that of G.
struct ErrorRateSpec {
    double a = 1.0;
    double b = 1.0;
    double snr_hat = 1.0;

    void validate() const;
};

// Integral of pdf(x) e^{cx} over the support. Throws DomainError when the
// tail integral keeps growing.
double mgf_from_pdf(const DistributionDescriptor& pdf, double c);
MGFRepr mgf_of(const DistributionDescriptor& d);
MGFRepr point_mass_mgf(double at);

// k-th moment (k in 1..4) from central differences at 0 with Richardson
// extrapolation.
double mgf_moment(const MGFRepr& m, int k);

// Craig's form of the Gaussian tail Q(x), or of Q(x)^2 when `squared`.
double q_craig(double x, bool squared = false);
// Reference tail 0.5 erfc(x / sqrt 2).
double q_function(double x);

// (a / pi) * integral over (0, pi/2] of M(-b snr_hat / (2 sin^2 phi)), taken
// in u = cot(phi).
double avg_error_rate(const ErrorRateSpec& spec, const MGFRepr& snr_mgf);
// Same quantity along phi directly (Gauss-Kronrod avoids the endpoint).
double avg_error_rate_phi(const ErrorRateSpec& spec, const MGFRepr& snr_mgf);
// Direct average of a Q(sqrt(b snr_hat x)) against the density of G.
double avg_error_rate_direct(const ErrorRateSpec& spec, const DistributionDescriptor& gain);

// sin^2(pi/2), the numerator of the operator error-probability integrand.
inline constexpr double kErrorNumerator = 1.0;

// (1 / pi) * integral over (0, pi/2] of M(-g snr_hat / sin^2 phi), where M is
// the MGF of the selected gain under one operator.
double p_err_operator(const MGFRepr& op_mgf, double snr_hat);

}  // namespace subchan
