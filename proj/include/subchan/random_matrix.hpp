#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "subchan/channel_model.hpp"
#include "subchan/distribution.hpp"

namespace subchan {

struct FixedPointConfig {
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    double damping = 0.5;  // weight of the new iterate

    void validate() const;
};

// E[1 / (1 + gamma X)] and E[log2(1 + gamma X)] over a sample or a law.
double eta_transform(std::span<const double> sample, double gamma);
double eta_transform(const DistributionDescriptor& law, double gamma);
double nu_transform(std::span<const double> sample, double gamma);
double nu_transform(const DistributionDescriptor& law, double gamma);

// Marchenko-Pastur law with ratio chi: the limiting spectrum of F^H F for an
// l x K matrix F with i.i.d. variance-1/l entries and K / l -> chi.
std::pair<double, double> mp_support(double chi);
double mp_atom(double chi);  // mass (1 - 1/chi)^+ at zero
double mp_density(double chi, double x);  // continuous part; 0 off the support
double mp_cdf(double chi, double x);
double mp_eta(double chi, double gamma);
double mp_nu(double chi, double gamma);
void write_mp_csv(std::ostream& os, double chi, std::size_t points);

enum class MixMode { hadamard, identical };
enum class MixingKind { iid, haar };  // identical mode: i.i.d. entries or orthonormal columns

// Hadamard mode: F = X o (Z diag(phi)) with X and Z both l x K.
// Identical mode: F = diag(x) U diag(phi) with U h x K.
struct RandomChannelModel {
    std::size_t l = 0;  // rows (h in identical mode)
    std::size_t K = 0;  // users
    MixMode mode = MixMode::hadamard;
    MixingKind mixing = MixingKind::iid;
    Eigen::MatrixXcd X_factor;  // hadamard: l x K coefficients; identical: l x l diagonal
    Eigen::MatrixXcd Z_factor;  // hadamard: l x K, variance 1/l
    Eigen::MatrixXcd U_factor;  // identical: l x K
    Eigen::VectorXcd Phi;       // per-user gains, length K

    double chi() const { return static_cast<double>(K) / static_cast<double>(l); }
    Eigen::MatrixXcd compose() const;
    void validate() const;
};

// Complex Gaussian entries with the given variance.
Eigen::MatrixXcd iid_matrix(std::size_t rows, std::size_t cols, double variance, std::uint64_t seed);
// Orthonormal columns from the QR factor of a Gaussian matrix (rows >= cols).
Eigen::MatrixXcd haar_columns(std::size_t rows, std::size_t cols, std::uint64_t seed);

RandomChannelModel hadamard_model(const Eigen::MatrixXcd& X, const Eigen::VectorXcd& phi, std::uint64_t seed);
RandomChannelModel identical_model(const Eigen::VectorXcd& coeffs, const Eigen::VectorXcd& phi, std::uint64_t seed,
                                   MixingKind mixing = MixingKind::iid);

// (1/K) sum of |Z_ij|^2 over entries with |Z_ij| >= delta.
double lindeberg_mass(const Eigen::MatrixXcd& Z, double delta);

// Y = F input + noise.
Eigen::MatrixXcd build_output(const RandomChannelModel& model, const Eigen::MatrixXcd& input,
                              const Eigen::MatrixXcd& noise);

enum class ProfileKind { variance_profile, channel_profile };

// Piecewise-constant function on [0,1]^2: row a in [i/l, (i+1)/l), column b
// in [k/K, (k+1)/K).
struct ProfileFunction {
    Eigen::MatrixXd values;
    ProfileKind kind = ProfileKind::variance_profile;
};

ProfileFunction constant_profile(std::size_t l, std::size_t K, double v);
// User k owns round(r l) rows, cyclically shifted per user, with i.i.d. unit
// exponential gains fixed by seed so that larger r only adds rows.
ProfileFunction allocation_profile(std::size_t l, std::size_t K, double r, std::uint64_t seed);
ProfileFunction channel_profile(const RandomChannelModel& model);

struct DecomposedResult {
    double eta = 1.0;
    double nu = 0.0;
    double gamma_d = 0.0;
    double gamma_t = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
};

// eta / nu of F F^H for F = A Z B: d holds the spectrum of A A^H (l values),
// t that of B B^H (K values), Z is l x K with variance-1/l entries.
DecomposedResult decomposed_eta_nu(std::span<const double> d, std::span<const double> t, double chi, double gamma,
                                   const FixedPointConfig& cfg = {});

struct ProfileResult {
    double eta = 1.0;
    double nu = 0.0;
    Eigen::VectorXd W;        // per row
    Eigen::VectorXd Upsilon;  // per column
    double residual = 0.0;
    std::size_t iterations = 0;
};

// eta / nu of F F^H for an l x K matrix whose entry variances are profile / l.
ProfileResult profile_eta_nu(const ProfileFunction& profile, double chi, double gamma,
                             const FixedPointConfig& cfg = {});

enum class SnrRegime { below_one, one, above_one };

struct TauResult {
    double chi_prime = 0.0;
    double tau = 0.0;
    SnrRegime regime = SnrRegime::one;
};

// High-SNR offset: nu(gamma) ~ min(chi P_Y, P_X) (log2(gamma chi) - tau).
TauResult high_snr_tau(const ProfileFunction& profile, double chi, const FixedPointConfig& cfg = {});
// log2(gamma chi) - nu(gamma) / min(chi P_Y, P_X) at a finite gamma.
double tau_at(const ProfileFunction& profile, double chi, double gamma, const FixedPointConfig& cfg = {});

struct MultiuserResult {
    std::vector<double> eta_users;  // per user; NaN for users with no allocation
    std::vector<double> F_grid;     // per user column
    std::vector<double> psi_grid;   // per row
    std::vector<double> phi;        // per user, F / |Phi_k|^2
    double residual = 0.0;
    double rescale_gap = 0.0;  // identical mode: |eta(s, c) - eta(s E[c], c / E[c])|
};

MultiuserResult multiuser_efficiency(const RandomChannelModel& model, double snr_star,
                                     const FixedPointConfig& cfg = {});
// Scalar efficiency for identically allocated sub-channels: c holds |C|^2
// samples, v holds |v|^2 samples.
double identical_efficiency(std::span<const double> c, std::span<const double> v, double chi, double snr,
                            const FixedPointConfig& cfg = {});
// Large-system check: mean over users of the linear-MMSE SINR divided by
// snr E[c], for F = diag(sqrt c) S diag(sqrt v) with S i.i.d. variance 1/rows.
double sampled_efficiency(std::span<const double> c, std::span<const double> v, double snr, std::uint64_t seed);

struct CapacityResult {
    double p_sym = 0.0;
    double s_sym_bound = 0.0;
    double f_eff = 0.0;
    double long_form = 0.0;  // hadamard: the expanded expression; identical: the l-function route
    double p_sym_interferer_ell = 0.0;  // hadamard: undecoded users weighted by their own l-function
    bool gate_holds = false;  // chi P(E[rho|Y] > 0) / P(E[rho|X] > 0) < 1
    bool clamped = false;
    std::vector<double> ell;  // per user column
};

CapacityResult p_sym_s_sym(const RandomChannelModel& model, double snr_total, const FixedPointConfig& cfg = {});
// Hadamard-mode capacity straight from a profile.
CapacityResult p_sym_profile(const ProfileFunction& profile, double chi, double snr_total,
                             const FixedPointConfig& cfg = {});
// (1/K) log2(e) * integral over [0, snr] of (1 - eta(x)) / x, with eta taken
// from an empirical spectrum of F F^H.
double p_sym_from_spectrum(std::span<const double> eigenvalues, std::size_t K, double snr_total);

struct TraceIdentity {
    double lhs = 0.0;         // (1/K) Tr (I + gamma F^H F)^{-1}
    double rhs = 0.0;         // Marchenko-Pastur integral
    double rhs_eta_form = 0.0;  // 1 - (1 - eta_{FF^H}(gamma)) / chi, fixed-point eta
};

TraceIdentity trace_identity(const RandomChannelModel& model, double snr_total);

}  // namespace subchan
