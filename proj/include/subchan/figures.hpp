#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subchan/selection.hpp"

namespace subchan {

std::vector<double> linspace(double lo, double hi, std::size_t points);
std::vector<double> logspace(double lo, double hi, std::size_t points);  // geometric, lo > 0

// Iteration counts per operator over threshold ratios (threshold = ratio * mean
// of the unit exponential base), all operators run on the same draws.
struct KappaSweepRow {
    double thr_ratio = 0.0;
    KappaReport l0, l, lp;
};

std::vector<KappaSweepRow> kappa_sweep(std::size_t n, std::size_t l, const std::vector<double>& ratios,
                                       std::size_t trials, std::uint64_t seed);
void write_kappa_sweep_csv(std::ostream& os, const std::vector<KappaSweepRow>& rows);

struct ErrorCurveRow {
    double snr_hat = 0.0;
    double l0 = 0.0, l = 0.0, lp = 0.0;
};

std::vector<ErrorCurveRow> error_curves(std::size_t n, std::size_t l, double thr_ratio,
                                        const std::vector<double>& snr_hats);
void write_error_curve_csv(std::ostream& os, const std::vector<ErrorCurveRow>& rows, Operator op);

struct CapacityRow {
    double snr = 0.0;
    double r = 0.0;
    double p_sym = 0.0;
    double long_form = 0.0;
};

// Allocation-ratio sweep on an l x K channel profile.
std::vector<CapacityRow> capacity_sweep(std::size_t l, std::size_t K, const std::vector<double>& r_values,
                                        const std::vector<double>& snrs, std::uint64_t seed);
void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows);

struct SuiteResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

// Oracle checks across the library, deterministic in (seed, trials).
std::vector<SuiteResult> run_validation(std::uint64_t seed, std::size_t trials);
void write_validation_csv(std::ostream& os, const std::vector<SuiteResult>& results);

}  // namespace subchan
