#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace subchan {

using cplx = std::complex<double>;

struct ModulationConfig {
    std::size_t n = 1;
    std::size_t l = 1;
    double sigma_omega0_sq = 1.0;
    double sigma_omega_sq = 1.0;
    std::vector<double> sigma_N_sq;  // per sub-channel; empty means all zero
    double sigma_0_sq = 1.0;
    std::uint64_t seed = 0;
    bool clamp = false;

    void validate() const;
};

// Flat key=value text; '#' starts a comment. sigma_N_sq takes a single value
// (broadcast to n) or a comma-separated list of n values.
ModulationConfig parse_modulation_config(std::istream& in);
ModulationConfig load_modulation_config(const std::string& path);

struct TransmittanceVector {
    std::vector<cplx> T;
    std::vector<cplx> FT;
    std::vector<double> mag_norm;  // |FT_i|^2 / l
    std::size_t l = 1;
};

struct SamplingOptions {
    bool clamp = false;      // real and imaginary parts restricted to [0, 1/sqrt 2]
    bool symmetric = false;  // imaginary part copied from the real part
    std::size_t l = 0;       // normalization count for mag_norm; 0 means n
};

TransmittanceVector sample_transmittance_vector(std::size_t n, double sigma_T_sq, std::uint64_t seed,
                                                const SamplingOptions& opt = {});

// Unnormalized forward transform, F_k = sum_m x_m exp(-2 pi i k m / n).
std::vector<cplx> dft(std::span<const cplx> x);
// Exact inverse of dft: (1/n) sum_k F_k exp(+2 pi i k m / n).
std::vector<cplx> idft(std::span<const cplx> F);

struct EavesdropperModel {
    std::vector<double> W;         // EPR variance per sub-channel, >= 1
    std::vector<double> T_eve_sq;  // beam-splitter transmittance per sub-channel, in [0, 1)

    void validate() const;
};

// Couples the splitter to the channel: |T_eve|^2 = 1 - |T|^2.
EavesdropperModel eavesdropper_from_transmittance(const TransmittanceVector& tv, std::vector<double> W);

std::vector<double> excess_noise(const EavesdropperModel& eve);

cplx single_carrier_coefficient(std::span<const cplx> FT, std::span<const std::size_t> selected);
double single_carrier_gain(std::span<const cplx> FT, std::span<const std::size_t> selected);

// Per-channel SNR* of one sub-channel; 0 when the effective noise is infinite.
double snr_star_term(double sigma_omega_sq, double ft_mag_sq, double sigma_x_sq);

double snr_star(const ModulationConfig& cfg, const EavesdropperModel& eve, std::span<const double> ft_mag_sq,
                std::span<const std::size_t> selected);

enum class ThresholdVariant { fixed, fallback, lambda_prime };

// Threshold magnitudes live on the same (1/l)|F|^2 scale as mag_norm. `lambda`
// is the mean threshold |F|^2 over the l sub-channels, so lambda = l * t_star_sq;
// `varpi` is the top-up offset on the (1/l)|F|^2 scale.
struct Threshold {
    double t_star_sq = 0.0;
    double lambda = 0.0;
    double mu = 0.5;
    double varpi = 0.0;
    std::size_t l = 1;

    static Threshold at(double t_star_sq, std::size_t l);
};

Threshold fixed_threshold(std::span<const cplx> T_star, std::size_t l);
Threshold fallback_threshold(std::span<const double> mags, double mu, std::size_t l);
// Adds the offset between the threshold and the weakest top-up magnitude.
Threshold lambda_prime_threshold(const Threshold& base, std::span<const double> bad_mags);

void write_transmittance_csv(std::ostream& os, const TransmittanceVector& tv);

}  // namespace subchan
