#pragma once

#include <cmath>
#include <cstddef>

namespace subchan::detail {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
        max_abs_ = std::fmax(max_abs_, std::abs(v));
    }
    CompensatedSum& operator+=(double v) noexcept {
        add(v);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }
    double max_term() const noexcept { return max_abs_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double max_abs_ = 0.0;
};

inline double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

inline double binom(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (std::size_t j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
    return r > 9e15 ? r : std::round(r);
}

inline double factorial(std::size_t n) {
    double r = 1.0;
    for (std::size_t j = 2; j <= n; ++j) r *= static_cast<double>(j);
    return r;
}

// p^k with the convention 0^0 = 1.
inline double ipow(double p, std::size_t k) {
    if (k == 0) return 1.0;
    return std::pow(p, static_cast<double>(k));
}

}  // namespace subchan::detail
