#include "subchan/random_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <ostream>

#include "subchan/csv.hpp"
#include "subchan/detail/numeric.hpp"
#include "subchan/errors.hpp"
#include "subchan/montecarlo.hpp"
#include "subchan/quadrature.hpp"
#include "subchan/rng.hpp"

namespace subchan {

namespace {

constexpr double kLog2e = std::numbers::log2e;
constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
    detail::CompensatedSum s;
    for (double x : v) s += x;
    return s.value() / static_cast<double>(v.size());
}

// Damped Picard iteration on a vector. Convergence is judged on the residual
// |map(x) - x| at the accepted iterate, never on the iteration count.
template <class Map>
std::pair<double, std::size_t> solve_fixed_point(Eigen::VectorXd& x, Map&& map, const FixedPointConfig& cfg,
                                                 const char* what) {
    cfg.validate();
    double res = kInf;
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        const Eigen::VectorXd y = map(x);
        if (!y.allFinite()) throw NumericError(std::string(what) + ": non-finite iterate");
        res = (y - x).cwiseAbs().maxCoeff() / std::max(1.0, x.cwiseAbs().maxCoeff());
        if (res < cfg.tol) {
            x = y;
            return {res, it + 1};
        }
        x = (1.0 - cfg.damping) * x + cfg.damping * y;
    }
    throw ConvergenceError(what, res);
}

double scalar_fixed_point(double x0, const auto& map, const FixedPointConfig& cfg, const char* what) {
    Eigen::VectorXd x(1);
    x[0] = x0;
    solve_fixed_point(
        x, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd::Constant(1, map(v[0])); }, cfg, what);
    return x[0];
}

// Expectation against the Marchenko-Pastur law. The continuous part is
// integrated in theta with x = u + (v - u)(1 - cos theta)/2, which removes
// the square-root edges.
template <class G>
double mp_expect(double chi, G&& g, double theta_hi = std::numbers::pi) {
    const auto [u, v] = mp_support(chi);
    const double half = 0.5 * (v - u);
    auto f = [&](double th) {
        const double x = u + half * (1.0 - std::cos(th));
        if (x <= 0.0) return 0.0;
        const double s = std::sin(th);
        return g(x) * half * half * s * s / (2.0 * std::numbers::pi * chi * x);
    };
    return mp_atom(chi) * g(0.0) + quad::integrate_gk(f, 0.0, theta_hi, 1e-14, 1e-12);
}

std::vector<double> column_means(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) out[static_cast<std::size_t>(k)] = m.col(k).mean();
    return out;
}

std::vector<double> abs2(const Eigen::VectorXcd& v) {
    std::vector<double> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = std::norm(v[i]);
    return out;
}

void require_profile(const ProfileFunction& p) {
    if (p.values.size() == 0) throw ParameterError("empty profile");
    if ((p.values.array() < 0.0).any() || !p.values.allFinite())
        throw ParameterError("profile must be finite and nonnegative");
}

}  // namespace

void FixedPointConfig::validate() const {
    if (!(tol > 0.0)) throw ParameterError("fixed-point tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw ParameterError("damping must lie in (0, 1]");
    if (max_iter == 0) throw ParameterError("max_iter must be positive");
}

double eta_transform(std::span<const double> sample, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (sample.empty()) throw ParameterError("empty spectrum");
    detail::CompensatedSum s;
    for (double x : sample) s += 1.0 / (1.0 + gamma * x);
    return s.value() / static_cast<double>(sample.size());
}

double nu_transform(std::span<const double> sample, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (sample.empty()) throw ParameterError("empty spectrum");
    detail::CompensatedSum s;
    for (double x : sample) s += std::log2(1.0 + gamma * x);
    return s.value() / static_cast<double>(sample.size());
}

double eta_transform(const DistributionDescriptor& law, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (gamma == 0.0) return 1.0;
    return quad::integrate_gk([&](double x) { return law.pdf(x) / (1.0 + gamma * x); }, law.lo, law.hi, 1e-14,
                              1e-12);
}

double nu_transform(const DistributionDescriptor& law, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (gamma == 0.0) return 0.0;
    return quad::integrate_gk([&](double x) { return law.pdf(x) * std::log2(1.0 + gamma * x); }, law.lo, law.hi,
                              1e-14, 1e-12);
}

std::pair<double, double> mp_support(double chi) {
    if (!(chi > 0.0)) throw ParameterError("chi must be positive");
    const double r = std::sqrt(chi);
    return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

double mp_atom(double chi) {
    if (!(chi > 0.0)) throw ParameterError("chi must be positive");
    return std::max(0.0, 1.0 - 1.0 / chi);
}

double mp_density(double chi, double x) {
    const auto [u, v] = mp_support(chi);
    if (x <= 0.0 || x <= u || x >= v) return 0.0;
    return std::sqrt((x - u) * (v - x)) / (2.0 * std::numbers::pi * chi * x);
}

double mp_cdf(double chi, double x) {
    if (x < 0.0) return 0.0;
    const auto [u, v] = mp_support(chi);
    if (x >= v) return 1.0;
    if (x <= u) return mp_atom(chi);
    const double c = std::clamp(1.0 - 2.0 * (x - u) / (v - u), -1.0, 1.0);
    return std::clamp(mp_expect(chi, [](double) { return 1.0; }, std::acos(c)), 0.0, 1.0);
}

double mp_eta(double chi, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (gamma == 0.0) return 1.0;
    return mp_expect(chi, [gamma](double x) { return 1.0 / (1.0 + gamma * x); });
}

double mp_nu(double chi, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (gamma == 0.0) return 0.0;
    return mp_expect(chi, [gamma](double x) { return std::log2(1.0 + gamma * x); });
}

void write_mp_csv(std::ostream& os, double chi, std::size_t points) {
    if (points < 2) throw ParameterError("need at least two points");
    const auto [u, v] = mp_support(chi);
    CsvWriter w(os, {"x", "f_chi"});
    for (std::size_t i = 0; i < points; ++i) {
        const double x = u + (v - u) * static_cast<double>(i) / static_cast<double>(points - 1);
        w.row(x, mp_density(chi, x));
    }
}

Eigen::MatrixXcd RandomChannelModel::compose() const {
    validate();
    if (mode == MixMode::hadamard) return X_factor.cwiseProduct(Z_factor * Phi.asDiagonal());
    return X_factor * U_factor * Phi.asDiagonal();
}

void RandomChannelModel::validate() const {
    if (l == 0 || K == 0) throw ParameterError("model needs l, K > 0");
    const auto L = static_cast<Eigen::Index>(l), k = static_cast<Eigen::Index>(K);
    if (Phi.size() != k) throw ParameterError("Phi must have K entries");
    if (mode == MixMode::hadamard) {
        if (X_factor.rows() != L || X_factor.cols() != k || Z_factor.rows() != L || Z_factor.cols() != k)
            throw ParameterError("hadamard factors must be l x K");
    } else {
        if (X_factor.rows() != L || X_factor.cols() != L || U_factor.rows() != L || U_factor.cols() != k)
            throw ParameterError("identical mode needs an l x l X and an l x K U");
    }
}

Eigen::MatrixXcd iid_matrix(std::size_t rows, std::size_t cols, double variance, std::uint64_t seed) {
    if (!(variance >= 0.0)) throw ParameterError("variance must be nonnegative");
    CounterRng rng(seed, 0);
    const double s = std::sqrt(0.5 * variance);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double re = rng.normal(), im = rng.normal();
            m(i, j) = cplx(s * re, s * im);
        }
    return m;
}

Eigen::MatrixXcd haar_columns(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (cols > rows) throw ParameterError("orthonormal columns need rows >= cols");
    const Eigen::MatrixXcd g = iid_matrix(rows, cols, 1.0, seed);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(g.rows(), g.cols());
    // Fix the phase of each column against the diagonal of R so the law is Haar.
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

RandomChannelModel hadamard_model(const Eigen::MatrixXcd& X, const Eigen::VectorXcd& phi, std::uint64_t seed) {
    RandomChannelModel m;
    m.l = static_cast<std::size_t>(X.rows());
    m.K = static_cast<std::size_t>(X.cols());
    m.mode = MixMode::hadamard;
    m.X_factor = X;
    m.Z_factor = iid_matrix(m.l, m.K, 1.0 / static_cast<double>(m.l), seed);
    m.Phi = phi;
    m.validate();
    return m;
}

RandomChannelModel identical_model(const Eigen::VectorXcd& coeffs, const Eigen::VectorXcd& phi, std::uint64_t seed,
                                   MixingKind mixing) {
    RandomChannelModel m;
    m.l = static_cast<std::size_t>(coeffs.size());
    m.K = static_cast<std::size_t>(phi.size());
    m.mode = MixMode::identical;
    m.mixing = mixing;
    m.X_factor = coeffs.asDiagonal();
    m.U_factor = mixing == MixingKind::haar ? haar_columns(m.l, m.K, seed)
                                            : iid_matrix(m.l, m.K, 1.0 / static_cast<double>(m.l), seed);
    m.Phi = phi;
    m.validate();
    return m;
}

double lindeberg_mass(const Eigen::MatrixXcd& Z, double delta) {
    if (Z.cols() == 0) throw ParameterError("empty matrix");
    double s = 0.0;
    for (Eigen::Index j = 0; j < Z.cols(); ++j)
        for (Eigen::Index i = 0; i < Z.rows(); ++i)
            if (std::abs(Z(i, j)) >= delta) s += std::norm(Z(i, j));
    return s / static_cast<double>(Z.cols());
}

Eigen::MatrixXcd build_output(const RandomChannelModel& model, const Eigen::MatrixXcd& input,
                              const Eigen::MatrixXcd& noise) {
    const Eigen::MatrixXcd F = model.compose();
    if (input.rows() != F.cols()) throw ParameterError("input must have K rows");
    if (noise.rows() != F.rows() || noise.cols() != input.cols())
        throw ParameterError("noise must be l x (input columns)");
    return F * input + noise;
}

ProfileFunction constant_profile(std::size_t l, std::size_t K, double v) {
    if (l == 0 || K == 0) throw ParameterError("profile needs l, K > 0");
    if (!(v >= 0.0)) throw ParameterError("profile value must be nonnegative");
    return {Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(K), v),
            ProfileKind::variance_profile};
}

ProfileFunction allocation_profile(std::size_t l, std::size_t K, double r, std::uint64_t seed) {
    if (l == 0 || K == 0) throw ParameterError("profile needs l, K > 0");
    if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("allocation ratio must lie in [0, 1]");
    const auto m = static_cast<std::size_t>(std::lround(r * static_cast<double>(l)));
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k) {
        CounterRng rng(seed, k);
        for (std::size_t i = 0; i < l; ++i) {
            const double g = rng.exponential(1.0);  // drawn for every row so r only adds rows
            if (i < m) rho(static_cast<Eigen::Index>((i + k) % l), static_cast<Eigen::Index>(k)) = g;
        }
    }
    return {rho, ProfileKind::channel_profile};
}

ProfileFunction channel_profile(const RandomChannelModel& model) {
    model.validate();
    if (model.mode != MixMode::hadamard)
        throw UnsupportedModeError("identical allocation has a rank-degenerate channel profile");
    Eigen::MatrixXd rho = model.X_factor.cwiseAbs2();
    for (Eigen::Index k = 0; k < rho.cols(); ++k) rho.col(k) *= std::norm(model.Phi[k]);
    return {rho, ProfileKind::channel_profile};
}

DecomposedResult decomposed_eta_nu(std::span<const double> d, std::span<const double> t, double chi, double gamma,
                                   const FixedPointConfig& cfg) {
    if (d.empty() || t.empty()) throw ParameterError("factor spectra must be nonempty");
    if (!(chi > 0.0)) throw ParameterError("chi must be positive");
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    DecomposedResult r;
    if (gamma == 0.0) return r;
    auto mean_ratio = [](std::span<const double> s, double g) {
        detail::CompensatedSum acc;
        for (double x : s) acc += x / (1.0 + g * x);
        return acc.value() / static_cast<double>(s.size());
    };
    // gamma_d = gamma E[T / (1 + gamma_t T)], gamma_t = gamma E[D / (1 + chi gamma_d D)].
    auto map = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(2);
        y[0] = gamma * mean_ratio(t, x[1]);
        y[1] = gamma * mean_ratio(d, chi * x[0]);
        return y;
    };
    Eigen::VectorXd x(2);
    x << gamma * mean_of(t), gamma * mean_of(d);
    const auto [res, iters] = solve_fixed_point(x, map, cfg, "decomposed fixed point");
    r.gamma_d = x[0];
    r.gamma_t = x[1];
    r.iterations = iters;
    const double prod = r.gamma_d * r.gamma_t / gamma;
    const double r1 = std::abs(prod - (1.0 - eta_transform(t, r.gamma_t)));
    const double r2 = std::abs(chi * prod - (1.0 - eta_transform(d, chi * r.gamma_d)));
    r.residual = std::max({res, r1, r2});
    if (r.residual > 100.0 * cfg.tol) throw ConvergenceError("decomposed fixed point residual", r.residual);
    r.eta = eta_transform(d, chi * r.gamma_d);
    r.nu = nu_transform(d, chi * r.gamma_d) + chi * nu_transform(t, r.gamma_t) - chi * prod * kLog2e;
    return r;
}

ProfileResult profile_eta_nu(const ProfileFunction& profile, double chi, double gamma, const FixedPointConfig& cfg) {
    require_profile(profile);
    if (!(chi > 0.0)) throw ParameterError("chi must be positive");
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    const Eigen::MatrixXd& V = profile.values;
    const auto L = V.rows(), K = V.cols();
    ProfileResult r;
    r.W = Eigen::VectorXd::Ones(L);
    r.Upsilon = Eigen::VectorXd::Ones(K);
    if (gamma == 0.0) return r;

    auto upsilon_of = [&](const Eigen::VectorXd& W) {
        // Upsilon(b) = 1 / (1 + gamma E_X[var(X, b) W(X)])
        return (1.0 + gamma * (V.transpose() * W).array() / static_cast<double>(L)).inverse().matrix().eval();
    };
    auto map = [&](const Eigen::VectorXd& W) {
        const Eigen::VectorXd U = upsilon_of(W);
        // W(a) = 1 / (1 + chi gamma E_Y[var(a, Y) Upsilon(Y)])
        return (1.0 + chi * gamma * (V * U).array() / static_cast<double>(K)).inverse().matrix().eval();
    };
    const auto [res, iters] = solve_fixed_point(r.W, map, cfg, "profile fixed point");
    r.residual = res;
    r.iterations = iters;
    r.Upsilon = upsilon_of(r.W);
    r.eta = r.W.mean();

    const Eigen::VectorXd colW = (V.transpose() * r.W) / static_cast<double>(L);  // E[var W | Y]
    const Eigen::VectorXd rowU = (V * r.Upsilon) / static_cast<double>(K);         // E[var Upsilon | X]
    double first = 0.0, second = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) first += std::log2(1.0 + gamma * colW[k]);
    for (Eigen::Index i = 0; i < L; ++i) second += std::log2(1.0 + gamma * chi * rowU[i]);
    const double cross = r.W.dot(V * r.Upsilon) / static_cast<double>(L * K);
    r.nu = chi * first / static_cast<double>(K) + second / static_cast<double>(L) - gamma * chi * cross * kLog2e;
    return r;
}

namespace {

struct Restricted {
    Eigen::MatrixXd V;
    double p_rows = 0.0;  // P(E[var | X] != 0)
    double p_cols = 0.0;  // P(E[var | Y] != 0)
};

Restricted restrict_nonzero(const Eigen::MatrixXd& V) {
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index i = 0; i < V.rows(); ++i)
        if (V.row(i).sum() != 0.0) rows.push_back(i);
    for (Eigen::Index k = 0; k < V.cols(); ++k)
        if (V.col(k).sum() != 0.0) cols.push_back(k);
    if (rows.empty()) throw ParameterError("profile is identically zero");
    Restricted out;
    out.V.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < cols.size(); ++k)
            out.V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = V(rows[i], cols[k]);
    out.p_rows = static_cast<double>(rows.size()) / static_cast<double>(V.rows());
    out.p_cols = static_cast<double>(cols.size()) / static_cast<double>(V.cols());
    return out;
}

}  // namespace

TauResult high_snr_tau(const ProfileFunction& profile, double chi, const FixedPointConfig& cfg) {
    require_profile(profile);
    if (!(chi > 0.0)) throw ParameterError("chi must be positive");
    const Restricted R = restrict_nonzero(profile.values);
    const Eigen::MatrixXd& V = R.V;
    const auto L = V.rows(), K = V.cols();
    TauResult out;
    out.chi_prime = chi * R.p_cols / R.p_rows;
    const double cp = out.chi_prime;

    if (std::abs(cp - 1.0) < 1e-12) {
        out.regime = SnrRegime::one;
        if ((V.array() <= 0.0).any()) throw DomainError("zero profile entries inside the support");
        out.tau = -(V.array() / std::numbers::e).log().mean() * kLog2e;
        return out;
    }
    if (cp < 1.0) {
        out.regime = SnrRegime::below_one;
        // W(b) = (1/chi') E_X'[var(X', b) / (1 + E_Y'[var(X', Y') / W(Y') | X'])]
        auto row_load = [&](const Eigen::VectorXd& W) {
            return ((V * W.cwiseInverse()) / static_cast<double>(K)).eval();
        };
        auto map = [&](const Eigen::VectorXd& W) {
            const Eigen::VectorXd g = (1.0 + row_load(W).array()).inverse();
            return ((V.transpose() * g) / (static_cast<double>(L) * cp)).eval();
        };
        Eigen::VectorXd W = Eigen::VectorXd::Constant(K, V.mean());
        solve_fixed_point(W, map, cfg, "high-SNR W fixed point");
        const double first = (W.array() / std::numbers::e).log().mean() * kLog2e;
        const double second = (1.0 + row_load(W).array()).log().mean() * kLog2e;
        out.tau = -first - second / cp;
        return out;
    }
    out.regime = SnrRegime::above_one;
    // p(b) = (1/chi') E_X'[var(X', b) / E_Y'[var(X', Y') / (1 + p(Y')) | X']]
    auto row_mass = [&](const Eigen::VectorXd& p) {
        return ((V * (1.0 + p.array()).inverse().matrix()) / static_cast<double>(K)).eval();
    };
    auto map = [&](const Eigen::VectorXd& p) {
        const Eigen::VectorXd m = row_mass(p);
        return ((V.transpose() * m.cwiseInverse()) / (static_cast<double>(L) * cp)).eval();
    };
    Eigen::VectorXd p = Eigen::VectorXd::Constant(K, 1.0);
    solve_fixed_point(p, map, cfg, "high-SNR p fixed point");
    const double first = (row_mass(p).array() / std::numbers::e).log().mean() * kLog2e;
    const double second = (1.0 + p.array()).log().mean() * kLog2e;
    out.tau = -first - cp * second;
    return out;
}

double tau_at(const ProfileFunction& profile, double chi, double gamma, const FixedPointConfig& cfg) {
    const Restricted R = restrict_nonzero(profile.values);
    const double nu = profile_eta_nu(profile, chi, gamma, cfg).nu;
    return std::log2(gamma * chi) - nu / std::min(chi * R.p_cols, R.p_rows);
}

double identical_efficiency(std::span<const double> c, std::span<const double> v, double chi, double snr,
                            const FixedPointConfig& cfg) {
    if (c.empty() || v.empty()) throw ParameterError("coefficient samples must be nonempty");
    if (!(snr >= 0.0)) throw ParameterError("snr must be nonnegative");
    const double cbar = mean_of(c);
    if (!(cbar > 0.0)) throw ParameterError("E|C|^2 must be positive");
    if (snr == 0.0) return 1.0;
    auto map = [&](double eta) {
        detail::CompensatedSum inner;
        for (double vv : v) inner += vv / (1.0 + cbar * snr * vv * eta);
        const double load = inner.value() / static_cast<double>(v.size());
        detail::CompensatedSum outer;
        for (double cc : c) outer += cc / (1.0 + snr * chi * cc * load);
        return outer.value() / static_cast<double>(c.size()) / cbar;
    };
    return scalar_fixed_point(1.0, map, cfg, "multiuser efficiency fixed point");
}

double sampled_efficiency(std::span<const double> c, std::span<const double> v, double snr, std::uint64_t seed) {
    if (c.empty() || v.empty()) throw ParameterError("coefficient samples must be nonempty");
    if (!(snr > 0.0)) throw ParameterError("snr must be positive");
    const auto rows = static_cast<Eigen::Index>(c.size()), cols = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXcd F = iid_matrix(c.size(), v.size(), 1.0 / static_cast<double>(rows), seed);
    for (Eigen::Index i = 0; i < rows; ++i) F.row(i) *= std::sqrt(c[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < cols; ++k) F.col(k) *= std::sqrt(v[static_cast<std::size_t>(k)]);
    const Eigen::MatrixXcd R = Eigen::MatrixXcd::Identity(rows, rows) + snr * F * F.adjoint();
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(R);
    const Eigen::MatrixXcd RinvF = ldlt.solve(F);
    const double cbar = mean_of(c);
    detail::CompensatedSum s;
    for (Eigen::Index k = 0; k < cols; ++k) {
        // f^H R^{-1} f with user k included; remove it by the inversion lemma.
        const double q = std::real(F.col(k).dot(RinvF.col(k)));
        const double sinr = snr * q / (1.0 - snr * q);
        s += sinr / (snr * cbar * v[static_cast<std::size_t>(k)]);
    }
    return s.value() / static_cast<double>(cols);
}

MultiuserResult multiuser_efficiency(const RandomChannelModel& model, double snr_star, const FixedPointConfig& cfg) {
    model.validate();
    if (!(snr_star >= 0.0)) throw ParameterError("snr must be nonnegative");
    MultiuserResult out;
    const double chi = model.chi();
    if (model.mode == MixMode::identical) {
        const auto c = abs2(model.X_factor.diagonal());
        const auto v = abs2(model.Phi);
        const double eta = identical_efficiency(c, v, chi, snr_star, cfg);
        const double cbar = mean_of(c);
        std::vector<double> cn(c);
        for (auto& x : cn) x /= cbar;
        const double rescaled = identical_efficiency(cn, v, chi, snr_star * cbar, cfg);
        out.rescale_gap = std::abs(eta - rescaled);
        out.eta_users.assign(model.K, eta);
        return out;
    }
    const Eigen::MatrixXd rho = channel_profile(model).values;
    const auto L = rho.rows(), K = rho.cols();
    const double s = snr_star;
    auto psi_of = [&](const Eigen::VectorXd& F) {
        // psi(a) = 1 / (1 + s chi E_Y[rho(a, Y) / (1 + s F(Y))])
        const Eigen::VectorXd y = (1.0 + s * F.array()).inverse();
        return (1.0 + s * chi * (rho * y).array() / static_cast<double>(K)).inverse().matrix().eval();
    };
    auto map = [&](const Eigen::VectorXd& F) {
        return ((rho.transpose() * psi_of(F)) / static_cast<double>(L)).eval();
    };
    Eigen::VectorXd F = rho.colwise().mean().transpose();
    out.residual = solve_fixed_point(F, map, cfg, "multiuser fixed point").first;
    const Eigen::VectorXd psi = psi_of(F);
    const auto col_mean = column_means(rho);
    for (Eigen::Index k = 0; k < K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        out.F_grid.push_back(F[k]);
        out.eta_users.push_back(col_mean[kk] > 0.0 ? F[k] / col_mean[kk]
                                                   : std::numeric_limits<double>::quiet_NaN());
        const double g = std::norm(model.Phi[k]);
        out.phi.push_back(g > 0.0 ? F[k] / g : 0.0);
    }
    out.psi_grid.assign(psi.data(), psi.data() + psi.size());
    return out;
}

CapacityResult p_sym_profile(const ProfileFunction& profile, double chi, double snr_total,
                             const FixedPointConfig& cfg) {
    require_profile(profile);
    if (!(snr_total >= 0.0)) throw ParameterError("snr must be nonnegative");
    const Eigen::MatrixXd& rho = profile.values;
    const auto L = rho.rows(), K = rho.cols();
    const double Kd = static_cast<double>(K), s = snr_total;
    CapacityResult out;
    {
        const Restricted R = restrict_nonzero(rho);
        out.gate_holds = chi * R.p_cols / R.p_rows < 1.0;
    }
    out.ell.assign(static_cast<std::size_t>(K), 0.0);
    if (s == 0.0) {
        for (Eigen::Index k = 0; k < K; ++k) out.ell[static_cast<std::size_t>(k)] = rho.col(k).mean();
        return out;
    }

    // Successive decoding: user b is decoded against the users in [b, 1],
    // whose joint interference is the profile fixed point restricted to those
    // columns. Column j covers [j/K, (j+1)/K) and b sits at its midpoint, so
    // half of column j's own cell counts as undecoded.
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(K);
    Eigen::VectorXd psi = Eigen::VectorXd::Ones(L);
    for (Eigen::Index j = K - 1; j >= 0; --j) {
        weight.setZero();
        weight[j] = 0.5;
        weight.tail(K - j - 1).setOnes();
        auto map = [&](const Eigen::VectorXd& p) {
            const Eigen::VectorXd F = (rho.transpose() * p) / static_cast<double>(L);
            const Eigen::VectorXd w = weight.array() / (1.0 + s * F.array());
            return (1.0 + s * chi * (rho * w).array() / Kd).inverse().matrix().eval();
        };
        solve_fixed_point(psi, map, cfg, "successive-decoding fixed point");
        out.ell[static_cast<std::size_t>(j)] = rho.col(j).dot(psi) / static_cast<double>(L);
    }
    detail::CompensatedSum acc;
    for (double e : out.ell) acc += std::log2(1.0 + s * e);
    out.p_sym = chi * acc.value() / (Kd * Kd);

    // The variant that weights each undecoded user by its own l-function.
    {
        Eigen::VectorXd tail = Eigen::VectorXd::Zero(L);  // (1/K) sum_{h > j} rho(., h) / (1 + s l_h)
        detail::CompensatedSum own;
        for (Eigen::Index j = K - 1; j >= 0; --j) {
            const Eigen::VectorXd col = rho.col(j);
            auto map = [&](double x) {
                const Eigen::ArrayXd load = tail.array() + 0.5 * col.array() / ((1.0 + s * x) * Kd);
                return (col.array() / (1.0 + s * chi * load)).mean();
            };
            const double ell = scalar_fixed_point(col.mean(), map, cfg, "capacity l-function fixed point");
            own += std::log2(1.0 + s * ell);
            tail += col / ((1.0 + s * ell) * Kd);
        }
        out.p_sym_interferer_ell = chi * own.value() / (Kd * Kd);
    }

    const ProfileResult pr = profile_eta_nu(profile, chi, s, cfg);
    out.long_form = pr.nu / Kd;
    // f_eff = chi E_Y[log2(1 + s F(Y))] with F(b) = E_X[rho(X, b) W(X)].
    const Eigen::VectorXd Fb = (rho.transpose() * pr.W) / static_cast<double>(L);
    out.f_eff = chi * (1.0 + s * Fb.array()).log().mean() * kLog2e;

    if (out.p_sym < 0.0) {
        std::clog << "warning: negative symmetric rate " << out.p_sym << " clamped to 0\n";
        out.p_sym = 0.0;
        out.clamped = true;
    }
    out.s_sym_bound = out.p_sym;
    return out;
}

double p_sym_from_spectrum(std::span<const double> eigenvalues, std::size_t K, double snr_total) {
    if (K == 0) throw ParameterError("K must be positive");
    if (!(snr_total >= 0.0)) throw ParameterError("snr must be nonnegative");
    if (snr_total == 0.0) return 0.0;
    auto f = [&](double x) { return (1.0 - eta_transform(eigenvalues, x)) / x; };
    return kLog2e * quad::integrate_gk(f, 0.0, snr_total, 1e-14, 1e-12) / static_cast<double>(K);
}

CapacityResult p_sym_s_sym(const RandomChannelModel& model, double snr_total, const FixedPointConfig& cfg) {
    model.validate();
    if (model.mode == MixMode::hadamard) return p_sym_profile(channel_profile(model), model.chi(), snr_total, cfg);
    if (!(snr_total >= 0.0)) throw ParameterError("snr must be nonnegative");

    const auto d = abs2(model.X_factor.diagonal());
    const auto t = abs2(model.Phi);
    const double chi = model.chi(), Kd = static_cast<double>(model.K), s = snr_total;
    CapacityResult out;
    out.gate_holds = chi < 1.0;
    out.ell.assign(model.K, 0.0);
    if (s == 0.0) return out;

    // Shannon-transform route: integral of (1 - eta(x)) / x with eta from the
    // decomposed fixed point.
    auto f = [&](double x) { return (1.0 - decomposed_eta_nu(d, t, chi, x, cfg).eta) / x; };
    out.p_sym = kLog2e * quad::integrate_gk(f, 0.0, s, 1e-12, 1e-9) / Kd;

    // l-function route at the user midpoints Y = (k + 1/2) / K:
    // z = l / (1 + l) solves z = E[s c / (chi Y s c + 1 + (1 - chi Y) l)]. The
    // right side minus z decreases in z, so the root is bracketed on [0, 1).
    detail::CompensatedSum acc;
    for (std::size_t k = 0; k < model.K; ++k) {
        const double y = (static_cast<double>(k) + 0.5) / Kd;
        auto excess = [&](double z) {
            const double ell = z / (1.0 - z);
            detail::CompensatedSum e;
            for (double c : d) e += s * c / (chi * y * s * c + 1.0 + (1.0 - chi * y) * ell);
            return e.value() / static_cast<double>(d.size()) - z;
        };
        double lo = 0.0, hi = 1.0 - 1e-15;
        if (excess(hi) > 0.0) {
            out.ell[k] = std::numeric_limits<double>::quiet_NaN();
            acc += std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        while (hi - lo > 1e-15) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? lo : hi) = mid;
        }
        const double z = 0.5 * (lo + hi);
        out.ell[k] = z / (1.0 - z);
        acc += std::log2(1.0 + out.ell[k]);
    }
    out.long_form = chi * acc.value() / (Kd * Kd);

    const double eta_u = identical_efficiency(d, t, chi, s, cfg);
    out.f_eff = chi * std::log2(1.0 + mean_of(d) * s * eta_u);
    if (out.p_sym < 0.0) {
        std::clog << "warning: negative symmetric rate " << out.p_sym << " clamped to 0\n";
        out.p_sym = 0.0;
        out.clamped = true;
    }
    out.s_sym_bound = out.p_sym;
    return out;
}

TraceIdentity trace_identity(const RandomChannelModel& model, double snr_total) {
    if (!(snr_total >= 0.0)) throw ParameterError("snr must be nonnegative");
    const Eigen::MatrixXcd F = model.compose();
    const double chi = model.chi(), Kd = static_cast<double>(model.K);
    // The nonzero spectrum of F^H F is shared with F F^H; F^H F has K - rank
    // extra zeros.
    const EmpiricalDist spec = empirical_spectrum(F);
    detail::CompensatedSum s;
    for (double x : spec.sorted_sample) s += 1.0 / (1.0 + snr_total * x);
    s += Kd - static_cast<double>(spec.n());
    TraceIdentity out;
    out.lhs = s.value() / Kd;
    out.rhs = mp_eta(chi, snr_total);
    const std::vector<double> ones(1, 1.0);
    const double eta_ff = decomposed_eta_nu(ones, ones, chi, snr_total).eta;
    out.rhs_eta_form = 1.0 - (1.0 - eta_ff) / chi;
    return out;
}

}  // namespace subchan
