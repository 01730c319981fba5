#include "subchan/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "subchan/csv.hpp"
#include "subchan/detail/numeric.hpp"
#include "subchan/quadrature.hpp"

namespace subchan {

void TrialPlan::validate() const {
    if (trials == 0) throw ParameterError("trial plan needs at least one trial");
}

EmpiricalDist EmpiricalDist::from(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    return EmpiricalDist{std::move(sample)};
}

double empirical_cdf(const EmpiricalDist& d, double x) {
    if (d.sorted_sample.empty()) throw ParameterError("empty sample");
    const auto it = std::upper_bound(d.sorted_sample.begin(), d.sorted_sample.end(), x);
    return static_cast<double>(it - d.sorted_sample.begin()) / static_cast<double>(d.n());
}

double ks_distance(const EmpiricalDist& d, const std::function<double(double)>& cdf) {
    if (d.sorted_sample.empty()) throw ParameterError("empty sample");
    const auto& s = d.sorted_sample;
    const double n = static_cast<double>(s.size());
    double worst = 0.0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        const double before = static_cast<double>(i) / n, after = static_cast<double>(j) / n;
        const double left = cdf(std::nextafter(s[i], -std::numeric_limits<double>::infinity()));
        const double at = cdf(s[i]);
        worst = std::max({worst, std::abs(before - left), std::abs(after - at)});
        i = j;
    }
    return worst;
}

double dkw_epsilon(std::size_t n, double alpha) {
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

EmpiricalDist empirical_spectrum(const Eigen::MatrixXcd& m) {
    if (!m.allFinite()) throw NumericError("matrix has non-finite entries");
    Eigen::MatrixXcd gram = m.rows() <= m.cols() ? Eigen::MatrixXcd(m * m.adjoint())
                                                 : Eigen::MatrixXcd(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");
    std::vector<double> ev(static_cast<std::size_t>(es.eigenvalues().size()));
    for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = std::max(0.0, es.eigenvalues()[static_cast<Eigen::Index>(i)]);
    return EmpiricalDist::from(std::move(ev));
}

Aggregate aggregate(std::span<const double> values) {
    Aggregate a;
    a.count = values.size();
    if (values.empty()) return a;
    detail::CompensatedSum sum;
    a.min = a.max = values[0];
    for (double v : values) {
        sum += v;
        a.min = std::min(a.min, v);
        a.max = std::max(a.max, v);
    }
    a.mean = sum.value() / static_cast<double>(a.count);
    if (a.count > 1) {
        detail::CompensatedSum sq;
        for (double v : values) sq += (v - a.mean) * (v - a.mean);
        a.variance = sq.value() / static_cast<double>(a.count - 1);
        a.std_error = std::sqrt(a.variance / static_cast<double>(a.count));
    }
    return a;
}

Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw ParameterError("histogram needs bins > 0 and hi > lo");
    Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        if (v < lo) {
            ++h.below;
        } else if (v > hi) {
            ++h.above;
        } else {
            auto b = static_cast<std::size_t>((v - lo) / width);
            ++h.counts[std::min(b, bins - 1)];
        }
    }
    return h;
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
    CsvWriter w(os, {"bin_lo", "bin_hi", "count"});
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        w.row(h.lo + static_cast<double>(i) * width, h.lo + static_cast<double>(i + 1) * width, h.counts[i]);
}

TabulatedCdf::TabulatedCdf(const std::function<double(double)>& pdf, double lo, double hi, std::size_t cells,
                           double atom_at_lo)
    : lo_(lo), hi_(hi), step_((hi - lo) / static_cast<double>(cells)) {
    if (cells == 0 || !(hi > lo)) throw ParameterError("tabulation needs cells > 0 and hi > lo");
    values_.resize(cells + 1);
    values_[0] = atom_at_lo;
    detail::CompensatedSum acc;
    acc += atom_at_lo;
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = lo + static_cast<double>(i) * step_;
        acc += quad::integrate_gk(pdf, a, a + step_, 1e-13, 1e-10);
        values_[i + 1] = acc.value();
    }
}

double TabulatedCdf::operator()(double x) const {
    if (x < lo_) return 0.0;
    if (x >= hi_) return values_.back();
    const double pos = (x - lo_) / step_;
    const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double sample_from(const DistributionDescriptor& d, CounterRng& rng) {
    if (d.family == Family::exponential) return rng.exponential(*d.mean);
    const double u = rng.uniform();
    double a = d.lo, b = d.hi;
    if (std::isinf(b)) {
        b = std::max(1.0, a + 1.0);
        while (clamped_cdf(d, b) < u) b = a + 2.0 * (b - a);
    }
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        (clamped_cdf(d, m) < u ? a : b) = m;
    }
    return 0.5 * (a + b);
}

}  // namespace subchan
