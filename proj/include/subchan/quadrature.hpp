#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace subchan::quad {

struct Options {
    double abs_tol = 1e-9;
    double rel_tol = 0.0;
    std::size_t max_splits = std::size_t{1} << 20;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t splits = 0;
    bool capped = false;
};

namespace detail {

// Rewrites an integral over [a, inf) onto [0, 1] with x = a + t / (1 - t).
template <class F>
auto half_line(F&& f, double a) {
    return [&f, a](double t) -> double {
        if (t >= 1.0) return 0.0;
        const double s = 1.0 - t;
        const double v = f(a + t / s);
        return std::isfinite(v) ? v / (s * s) : 0.0;
    };
}

template <class F>
Result simpson_finite(F&& f, double a, double b, const Options& opt) {
    struct Panel {
        double a, b, fa, fm, fb, whole, tol;
        int depth;
    };
    Result out;
    if (a == b) return out;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(whole));

    std::vector<Panel> stack;
    stack.push_back({a, b, fa, fm, fb, whole, tol, 0});
    double sum = 0.0, comp = 0.0;
    auto add = [&](double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    };
    constexpr int kMaxDepth = 60;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const double lm = 0.5 * (p.a + mid), rm = 0.5 * (mid + p.b);
        const double flm = f(lm), frm = f(rm);
        const double h = (p.b - p.a) / 12.0;
        const double left = h * (p.fa + 4.0 * flm + p.fm);
        const double right = h * (p.fm + 4.0 * frm + p.fb);
        const double delta = left + right - p.whole;
        const bool budget_left = out.splits < opt.max_splits && p.depth < kMaxDepth;
        // Do not accept the first few levels blindly: a coarse Simpson pass can
        // miss narrow peaks entirely.
        if ((p.depth >= 4 && std::abs(delta) <= 15.0 * p.tol) || !budget_left) {
            if (!budget_left) out.capped = true;
            add(left + right + delta / 15.0);
            out.error += std::abs(delta) / 15.0;
            continue;
        }
        ++out.splits;
        stack.push_back({mid, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
        stack.push_back({p.a, mid, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
    }
    out.value = sum + comp;
    return out;
}

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        kron += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    value = kron * h;
    error = std::abs((kron - gauss) * h);
}

template <class F>
Result kronrod_finite(F&& f, double a, double b, double abs_tol, double rel_tol, std::size_t max_panels) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    Result out;
    if (a == b) return out;
    std::priority_queue<Panel> heap;
    double v, e;
    gk15(f, a, b, v, e);
    heap.push({a, b, v, e});
    double total = v, err = e;
    std::size_t panels = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (panels >= max_panels) {
            out.capped = true;
            break;
        }
        const Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        double v1, e1, v2, e2;
        gk15(f, p.a, m, v1, e1);
        gk15(f, m, p.b, v2, e2);
        heap.push({p.a, m, v1, e1});
        heap.push({m, p.b, v2, e2});
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        ++panels;
    }
    // Re-add from scratch to shed accumulated update error.
    double sum = 0.0, comp = 0.0, esum = 0.0;
    while (!heap.empty()) {
        const double x = heap.top().value;
        esum += heap.top().error;
        heap.pop();
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    out.value = sum + comp;
    out.error = esum;
    out.splits = panels - 1;
    return out;
}

}  // namespace detail

// Adaptive Simpson; an infinite upper limit is mapped onto [0, 1].
template <class F>
Result simpson(F&& f, double a, double b, const Options& opt = {}) {
    if (std::isinf(b)) {
        auto g = detail::half_line(f, a);
        return detail::simpson_finite(g, 0.0, 1.0, opt);
    }
    return detail::simpson_finite(f, a, b, opt);
}

template <class F>
double integrate(F&& f, double a, double b, const Options& opt = {}) {
    return simpson(std::forward<F>(f), a, b, opt).value;
}

// Adaptive 15-point Gauss-Kronrod. Never evaluates endpoints, so it is the
// choice for integrable endpoint singularities and for inner levels of nested
// integrals where Simpson's evaluation count would multiply out.
template <class F>
Result kronrod(F&& f, double a, double b, double abs_tol = 1e-11, double rel_tol = 1e-11,
               std::size_t max_panels = 4000) {
    if (std::isinf(b)) {
        auto g = detail::half_line(f, a);
        return detail::kronrod_finite(g, 0.0, 1.0, abs_tol, rel_tol, max_panels);
    }
    return detail::kronrod_finite(f, a, b, abs_tol, rel_tol, max_panels);
}

template <class F>
double integrate_gk(F&& f, double a, double b, double abs_tol = 1e-11, double rel_tol = 1e-11) {
    return kronrod(std::forward<F>(f), a, b, abs_tol, rel_tol).value;
}

}  // namespace subchan::quad
