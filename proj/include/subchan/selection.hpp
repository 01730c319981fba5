#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subchan/channel_model.hpp"
#include "subchan/distribution.hpp"
#include "subchan/mgf_error.hpp"

namespace subchan {

// Complete scan, progressive stop, progressive stop with top-up from the bad set.
enum class Operator { lambda0, lambda, lambda_prime };
enum class ThresholdRule { fixed, fallback };

struct OperatorKind {
    Operator op = Operator::lambda0;
    ThresholdRule rule = ThresholdRule::fixed;

    void validate() const;
};

std::string operator_name(Operator op);

struct SelectionOutcome {
    std::vector<std::size_t> selected;  // descending magnitude, ties by index
    std::vector<std::size_t> good_set;  // scanned and at or above the threshold
    std::vector<std::size_t> bad_set;   // scanned and below the threshold
    cplx A_j{0.0, 0.0};
    double A_j_sq = 0.0;    // mean of the selected magnitudes
    double gain_sum = 0.0;  // sum of the selected magnitudes
    std::size_t iterations = 0;   // coefficient evaluations
    std::size_t comparisons = 0;  // ordering comparisons, reported separately
    Threshold threshold_used;
};

struct ScanOptions {
    std::vector<std::size_t> order;             // explicit scan order; empty means natural order
    std::optional<std::uint64_t> shuffle_seed;  // random scan order instead
    std::vector<cplx> FT;                       // Fourier coefficients behind the magnitudes, if known
};

// Under the fallback rule the threshold is recomputed as mu * max(mags) with
// mu taken from `thr`.
SelectionOutcome run_operator(const OperatorKind& kind, std::span<const double> mags, std::size_t l,
                              const Threshold& thr, const ScanOptions& opt = {});

enum class SelectProb { exact_l_fixed, exact_k_fallback, at_least_l, exactly_k_short };

// `thr` is the threshold magnitude; `mu` only matters for exact_k_fallback.
double prob_select(SelectProb kind, std::size_t n, std::size_t l, std::size_t k, const DistributionDescriptor& base,
                   double thr, double mu = 0.5);

// Closed forms of the average iteration count as published.
double kappa_analytic(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                      double thr);
// Expected iteration count of the procedures as run_operator executes them.
double kappa_exact(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                   double thr);

struct KappaReport {
    double analytic = 0.0;
    double exact = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    bool analytic_flagged = false;  // analytic differs from empirical by more than 5%
    bool exact_flagged = false;
};

// Draws i.i.d. magnitudes from `base` and averages run_operator's iterations.
KappaReport kappa_report(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                         double thr, std::size_t trials, std::uint64_t seed);

// MGF of the selected gain sum under each operator, exact for i.i.d.
// magnitudes. Throws UnsupportedModeError for the progressive operators with
// the fallback rule.
double operator_mgf(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                    double thr, double mu, double x);
MGFRepr operator_mgf_repr(const OperatorKind& kind, std::size_t n, std::size_t l, const DistributionDescriptor& base,
                          double thr, double mu);
// Per-channel censored MGF: cdf(thr) + integral of pdf e^{xz} over [thr, inf).
double censored_channel_mgf(const DistributionDescriptor& base, double thr, double x);
// Product of l censored channel MGFs; agrees with the exact complete-scan MGF
// only when n = l.
double censored_product_mgf(std::size_t l, const DistributionDescriptor& base, double thr, double x);

// Distribution function of the mean selected magnitude under the top-up
// operator, exponential base only.
double lambda_prime_cdf(std::size_t n, std::size_t l, const DistributionDescriptor& base, double thr, double x);

struct BatchRecord {
    std::size_t trial = 0;
    Operator op = Operator::lambda0;
    std::size_t iterations = 0;
    double a_j_sq = 0.0;
    std::size_t selected_count = 0;
};

void write_batch_csv(std::ostream& os, std::span<const BatchRecord> records);

}  // namespace subchan
