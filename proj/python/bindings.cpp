#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subchan/errors.hpp"
#include "subchan/figures.hpp"
#include "subchan/mgf_error.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/order_stats.hpp"
#include "subchan/random_matrix.hpp"
#include "subchan/selection.hpp"

namespace py = pybind11;
using namespace subchan;

namespace {

Operator parse_op(const std::string& s) {
    if (s == "l0") return Operator::lambda0;
    if (s == "l") return Operator::lambda;
    if (s == "lp") return Operator::lambda_prime;
    throw ParameterError("operator must be 'l0', 'l' or 'lp'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sub-channel selection statistics and random-matrix capacity";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<UnsupportedModeError>(m, "UnsupportedModeError", PyExc_NotImplementedError);

    m.def("mp_support", &mp_support, py::arg("chi"));
    m.def("mp_density", &mp_density, py::arg("chi"), py::arg("x"));
    m.def("mp_cdf", &mp_cdf, py::arg("chi"), py::arg("x"));
    m.def("mp_eta", &mp_eta, py::arg("chi"), py::arg("gamma"));
    m.def("mp_nu", &mp_nu, py::arg("chi"), py::arg("gamma"));

    m.def(
        "eta_transform", [](const std::vector<double>& s, double g) { return eta_transform(s, g); },
        py::arg("sample"), py::arg("gamma"));
    m.def(
        "nu_transform", [](const std::vector<double>& s, double g) { return nu_transform(s, g); }, py::arg("sample"),
        py::arg("gamma"));
    m.def(
        "iid_spectrum",
        [](std::size_t rows, std::size_t cols, std::uint64_t seed) {
            return empirical_spectrum(iid_matrix(rows, cols, 1.0 / static_cast<double>(rows), seed)).sorted_sample;
        },
        py::arg("rows"), py::arg("cols"), py::arg("seed"),
        "Eigenvalues of F^H F (or F F^H, whichever is smaller) for variance-1/rows entries.");
    m.def(
        "trace_identity",
        [](std::size_t rows, std::size_t cols, double gamma, std::uint64_t seed) {
            const auto t = trace_identity(
                hadamard_model(Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)),
                               Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(cols)), seed),
                gamma);
            return py::dict(py::arg("lhs") = t.lhs, py::arg("rhs") = t.rhs, py::arg("rhs_eta_form") = t.rhs_eta_form);
        },
        py::arg("rows"), py::arg("cols"), py::arg("gamma"), py::arg("seed"));
    m.def(
        "identical_efficiency",
        [](const std::vector<double>& c, const std::vector<double>& v, double chi, double snr) {
            return identical_efficiency(c, v, chi, snr);
        },
        py::arg("c"), py::arg("v"), py::arg("chi"), py::arg("snr"));

    m.def("q_function", &q_function, py::arg("x"));
    m.def("q_craig", &q_craig, py::arg("x"), py::arg("squared") = false);
    m.def(
        "avg_error_rate_exponential",
        [](double mean, double a, double b, double snr_hat) {
            return avg_error_rate({a, b, snr_hat}, mgf_of(exponential_law(mean)));
        },
        py::arg("mean"), py::arg("a"), py::arg("b"), py::arg("snr_hat"));

    m.def(
        "ordered_pdf",
        [](std::size_t n, std::size_t l, std::size_t i, double x) {
            return ordered_pdf({l, n, exponential_law(1.0)}, i, x);
        },
        py::arg("n"), py::arg("l"), py::arg("i"), py::arg("x"), "Density of the i-th largest of n unit exponentials.");
    m.def(
        "top_sum_pdf", [](std::size_t n, std::size_t l, double x) { return top_sum_pdf(n, l, 1.0, x).value; },
        py::arg("n"), py::arg("l"), py::arg("x"));

    m.def(
        "run_operator",
        [](const std::string& op, const std::vector<double>& mags, std::size_t l, double thr) {
            const auto o = run_operator({parse_op(op), ThresholdRule::fixed}, mags, l, Threshold::at(thr, l));
            return py::dict(py::arg("selected") = o.selected, py::arg("iterations") = o.iterations,
                            py::arg("a_j_sq") = o.A_j_sq, py::arg("gain_sum") = o.gain_sum);
        },
        py::arg("op"), py::arg("mags"), py::arg("l"), py::arg("thr"));
    m.def(
        "kappa_exact",
        [](const std::string& op, std::size_t n, std::size_t l, double thr) {
            return kappa_exact({parse_op(op), ThresholdRule::fixed}, n, l, exponential_law(1.0), thr);
        },
        py::arg("op"), py::arg("n"), py::arg("l"), py::arg("thr"));
    m.def(
        "kappa_sweep",
        [](std::size_t n, std::size_t l, const std::vector<double>& ratios, std::size_t trials, std::uint64_t seed) {
            py::list out;
            for (const auto& r : kappa_sweep(n, l, ratios, trials, seed))
                out.append(py::dict(py::arg("thr_ratio") = r.thr_ratio, py::arg("kappa_l0") = r.l0.empirical,
                                    py::arg("kappa_l") = r.l.empirical, py::arg("kappa_lp") = r.lp.empirical,
                                    py::arg("analytic_l0") = r.l0.analytic, py::arg("analytic_l") = r.l.analytic,
                                    py::arg("analytic_lp") = r.lp.analytic));
            return out;
        },
        py::arg("n"), py::arg("l"), py::arg("ratios"), py::arg("trials"), py::arg("seed"));
    m.def(
        "error_curves",
        [](std::size_t n, std::size_t l, double thr_ratio, const std::vector<double>& snr_hats) {
            py::list out;
            for (const auto& r : error_curves(n, l, thr_ratio, snr_hats))
                out.append(py::dict(py::arg("snr_hat") = r.snr_hat, py::arg("p_err_l0") = r.l0,
                                    py::arg("p_err_l") = r.l, py::arg("p_err_lp") = r.lp));
            return out;
        },
        py::arg("n"), py::arg("l"), py::arg("thr_ratio"), py::arg("snr_hats"));
    m.def(
        "capacity_sweep",
        [](std::size_t l, std::size_t K, const std::vector<double>& rs, const std::vector<double>& snrs,
           std::uint64_t seed) {
            py::list out;
            for (const auto& r : capacity_sweep(l, K, rs, snrs, seed))
                out.append(py::dict(py::arg("snr") = r.snr, py::arg("r") = r.r, py::arg("p_sym") = r.p_sym,
                                    py::arg("long_form") = r.long_form));
            return out;
        },
        py::arg("l"), py::arg("K"), py::arg("r_values"), py::arg("snrs"), py::arg("seed"));
    m.def(
        "run_validation",
        [](std::uint64_t seed, std::size_t trials) {
            py::list out;
            for (const auto& r : run_validation(seed, trials))
                out.append(py::dict(py::arg("suite") = r.name, py::arg("passed") = r.passed,
                                    py::arg("residual") = r.residual, py::arg("tolerance") = r.tolerance));
            return out;
        },
        py::arg("seed"), py::arg("trials"));
}
