#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "subchan/distribution.hpp"
#include "subchan/errors.hpp"
#include "subchan/rng.hpp"

namespace subchan {

struct TrialPlan {
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::size_t workers = 1;  // 0 picks hardware concurrency

    void validate() const;
};

struct EmpiricalDist {
    std::vector<double> sorted_sample;

    static EmpiricalDist from(std::vector<double> sample);
    std::size_t n() const noexcept { return sorted_sample.size(); }
};

// Fraction of the sample <= x.
double empirical_cdf(const EmpiricalDist& d, double x);
// Largest gap between the empirical step function and `cdf`, taken on both
// sides of every jump.
double ks_distance(const EmpiricalDist& d, const std::function<double(double)>& cdf);
// Dvoretzky-Kiefer-Wolfowitz band: P(sup |F_n - F| > eps) <= alpha.
double dkw_epsilon(std::size_t n, double alpha);

// Eigenvalues of the smaller Gram orientation, clamped at 0, ascending.
EmpiricalDist empirical_spectrum(const Eigen::MatrixXcd& m);

struct Aggregate {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased; 0 for a single trial
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Index-ordered reduction with compensated sums, so the result does not depend
// on how trials were scheduled.
Aggregate aggregate(std::span<const double> values);

// Runs trial_fn(derived_seed, index) for every index and returns the results in
// index order. The first failing trial (lowest index) is rethrown as a
// TrialFailure carrying its seed.
template <class R, class Fn>
std::vector<R> map_trials(const TrialPlan& plan, Fn&& trial_fn) {
    plan.validate();
    std::vector<std::optional<R>> slots(plan.trials);
    std::size_t workers = plan.workers ? plan.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, plan.trials);

    std::atomic<std::size_t> next{0};
    std::mutex fail_mu;
    std::optional<std::size_t> fail_index;
    std::string fail_cause;

    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.trials) return;
            const std::uint64_t seed = derive_seed(plan.seed, i);
            try {
                slots[i].emplace(trial_fn(seed, i));
            } catch (const std::exception& e) {
                std::lock_guard lock(fail_mu);
                if (!fail_index || i < *fail_index) {
                    fail_index = i;
                    fail_cause = e.what();
                }
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (fail_index) throw TrialFailure(*fail_index, derive_seed(plan.seed, *fail_index), fail_cause);

    std::vector<R> out;
    out.reserve(plan.trials);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

template <class Fn>
Aggregate run_trials(const TrialPlan& plan, Fn&& trial_fn) {
    const auto values = map_trials<double>(plan, std::forward<Fn>(trial_fn));
    return aggregate(values);
}

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;
    std::size_t below = 0;
    std::size_t above = 0;
};

// Bins are half-open [lo_i, hi_i); the last bin also takes hi.
Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi);
void write_histogram_csv(std::ostream& os, const Histogram& h);

// Distribution function tabulated from a density by cumulative quadrature on
// a grid over [lo, hi], with linear interpolation in between. Mass outside the
// grid is ignored, so the grid must cover the support up to negligible tails.
class TabulatedCdf {
public:
    TabulatedCdf(const std::function<double(double)>& pdf, double lo, double hi, std::size_t cells,
                 double atom_at_lo = 0.0);

    double operator()(double x) const;
    double total_mass() const noexcept { return values_.back(); }

private:
    double lo_, hi_, step_;
    std::vector<double> values_;
};

// Draw from a law by inverting its distribution function (closed form for the
// exponential family, bisection otherwise).
double sample_from(const DistributionDescriptor& d, CounterRng& rng);

}  // namespace subchan
