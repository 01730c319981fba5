#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>

#include "subchan/distribution.hpp"

namespace subchan {

// l ordered coefficients drawn from n i.i.d. copies of `base`. Order index 1
// is the largest value.
struct OrderedEnsemble {
    std::size_t l = 1;
    std::size_t n = 1;
    DistributionDescriptor base;

    void validate() const;
};

// Density / distribution of the r-th largest of `pop` i.i.d. draws.
double order_statistic_pdf(const DistributionDescriptor& base, std::size_t pop, std::size_t r, double x);
double order_statistic_cdf(const DistributionDescriptor& base, std::size_t pop, std::size_t r, double x);

// i-th largest among the l coefficients of the ensemble.
double ordered_pdf(const OrderedEnsemble& ens, std::size_t i, double x);
double ordered_cdf(const OrderedEnsemble& ens, std::size_t i, double x);

enum class JointMode { pair, all_ordered, selected_from_n };

// Joint density of the k-th and m-th largest (k < m) at x >= y.
double joint_pdf_pair(const OrderedEnsemble& ens, std::size_t k, std::size_t m, double x, double y);
// Joint density of all l ordered values; point must be descending.
double joint_pdf_all(const OrderedEnsemble& ens, std::span<const double> point);
// Joint density of the top l of n; point must be descending.
double joint_pdf_selected(const OrderedEnsemble& ens, std::span<const double> point);
double joint_pdf(const OrderedEnsemble& ens, JointMode mode, std::span<const double> point, std::size_t k = 1,
                 std::size_t m = 2);

// Density of the m-th largest at x given that the i-th largest (i < m) equals y.
double conditional_pdf(const OrderedEnsemble& ens, std::size_t m, std::size_t i, double y, double x);
// Density of a draw known to exceed y: pdf(x) / (1 - cdf(y)) for x >= y.
double residual_pdf(const DistributionDescriptor& base, double y, double x);

// Density of the sum of the l-1 values above the l-th largest of n, given
// that the l-th largest equals y.
double upper_sum_conditional_pdf(const OrderedEnsemble& ens, double y, double u);
// Density of the sum of the top l of n values.
double partial_sum_pdf(const OrderedEnsemble& ens, double x);

// Upper-truncated exponential on (0, upper); upper may be infinite.
double truncated_exp_pdf(double mean, double upper, double x);
// Exponential restricted to [lower, upper].
double band_exp_pdf(double mean, double lower, double upper, double x);
double band_exp_mgf(double mean, double lower, double upper, double w);

struct FlaggedValue {
    double value = 0.0;
    bool fallback = false;  // alternating series abandoned for the quadrature route
};

// Factor of term k in the spacing representation of the top-l sum of n
// exponentials: (1 - w mean min(k, l) / k)^{-1}.
double top_sum_term_mgf(std::size_t k, std::size_t l, double mean, double w);
// MGF of the sum of the top l of n exponentials with the given mean.
double top_sum_mgf(std::size_t n, std::size_t l, double mean, double w);
// Closed-form density of the same sum. The alternating series is accepted when
// its estimated cancellation error stays below `rel_bound` relative to the value.
FlaggedValue top_sum_pdf(std::size_t n, std::size_t l, double mean, double x, double rel_bound = 1e-9);

// Exponential base. g2 is the l-th largest of n, g1 the sum of the l-1 values
// above it.
double exp_residual_pdf(double mean, double x, double y);
double exp_upper_sum_conditional_pdf(std::size_t l, double mean, double g2, double g1);
double exp_lth_largest_pdf(std::size_t n, std::size_t l, double mean, double g2);
double exp_lth_largest_upper_sum_pdf(std::size_t n, std::size_t l, double mean, double g2, double g1);

void write_density_csv(std::ostream& os, std::span<const double> grid, const std::function<double(double)>& pdf);

}  // namespace subchan
