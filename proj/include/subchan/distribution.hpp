#pragma once

#include <functional>
#include <limits>
#include <optional>

namespace subchan {

enum class Family { custom, exponential };

// Common law of the unordered coefficients: density, distribution function
// and support. `partial_mgf(c, a, b)` is the integral of pdf(z) e^{cz} over
// [a, b]; when absent it is computed by quadrature.
struct DistributionDescriptor {
    std::function<double(double)> pdf;
    std::function<double(double)> cdf;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    std::optional<double> mean;
    Family family = Family::custom;
    std::function<double(double, double, double)> partial_mgf;
};

DistributionDescriptor exponential_law(double mean = 1.0);
DistributionDescriptor gamma_law(double shape, double scale = 1.0);

// Throws ParameterError unless cdf(lo) = 0, cdf(hi) = 1 (1e-9) and the pdf
// integrates to 1 (1e-6).
void validate_descriptor(const DistributionDescriptor& d);

double partial_mgf(const DistributionDescriptor& d, double c, double a, double b);

// Distribution function clamped onto [0, 1], with arguments outside the support
// mapped to the support limits.
double clamped_cdf(const DistributionDescriptor& d, double x);

}  // namespace subchan
