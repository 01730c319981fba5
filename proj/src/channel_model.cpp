#include "subchan/channel_model.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "subchan/csv.hpp"
#include "subchan/errors.hpp"
#include "subchan/rng.hpp"

namespace subchan {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<cplx> run_fft(std::span<const cplx> in, int sign) {
    const auto n = static_cast<int>(in.size());
    std::vector<cplx> out(in.size());
    if (n == 0) return out;
    auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * in.size()));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
    std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(buf));
    fftw_execute(plan);
    std::copy_n(reinterpret_cast<cplx*>(buf), in.size(), out.begin());
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key + "': not a number: " + v);
    }
    if (used != v.size()) throw ParameterError("config key '" + key + "': trailing characters in " + v);
    return x;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ParameterError("config key '" + key + "': not a nonnegative integer: " + v);
    return std::stoull(v);
}

}  // namespace

void ModulationConfig::validate() const {
    if (n == 0 || l == 0 || l > n) throw ParameterError("need 1 <= l <= n");
    if (!(sigma_omega0_sq > 0.0) || !std::isfinite(sigma_omega0_sq))
        throw ParameterError("sigma_omega0_sq must be positive");
    if (!(sigma_omega_sq > 0.0) || !std::isfinite(sigma_omega_sq))
        throw ParameterError("sigma_omega_sq must be positive");
    if (!(sigma_0_sq > 0.0) || !std::isfinite(sigma_0_sq)) throw ParameterError("sigma_0_sq must be positive");
    if (!sigma_N_sq.empty() && sigma_N_sq.size() != n) throw ParameterError("sigma_N_sq must have n entries");
    for (double v : sigma_N_sq)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("sigma_N_sq entries must be >= 0");
}

ModulationConfig parse_modulation_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParameterError("config line without '=': " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    ModulationConfig cfg;
    std::string noise;
    for (const auto& [k, v] : kv) {
        if (k == "n") cfg.n = parse_count(k, v);
        else if (k == "l") cfg.l = parse_count(k, v);
        else if (k == "sigma_omega0_sq") cfg.sigma_omega0_sq = parse_real(k, v);
        else if (k == "sigma_omega_sq") cfg.sigma_omega_sq = parse_real(k, v);
        else if (k == "sigma_0_sq") cfg.sigma_0_sq = parse_real(k, v);
        else if (k == "sigma_N_sq") noise = v;
        else if (k == "seed") cfg.seed = parse_count(k, v);
        else if (k == "clamp") {
            if (v == "1" || v == "true") cfg.clamp = true;
            else if (v == "0" || v == "false") cfg.clamp = false;
            else throw ParameterError("config key 'clamp': expected true/false");
        } else {
            throw ParameterError("unknown config key: " + k);
        }
    }
    if (!noise.empty()) {
        std::vector<double> vals;
        std::stringstream ss(noise);
        std::string item;
        while (std::getline(ss, item, ',')) vals.push_back(parse_real("sigma_N_sq", trim(item)));
        if (vals.size() == 1) vals.assign(cfg.n, vals.front());
        cfg.sigma_N_sq = std::move(vals);
    }
    cfg.validate();
    return cfg;
}

ModulationConfig load_modulation_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    return parse_modulation_config(in);
}

std::vector<cplx> dft(std::span<const cplx> x) { return run_fft(x, FFTW_FORWARD); }

std::vector<cplx> idft(std::span<const cplx> F) {
    auto out = run_fft(F, FFTW_BACKWARD);
    const double inv = F.empty() ? 0.0 : 1.0 / static_cast<double>(F.size());
    for (auto& v : out) v *= inv;
    return out;
}

TransmittanceVector sample_transmittance_vector(std::size_t n, double sigma_T_sq, std::uint64_t seed,
                                                const SamplingOptions& opt) {
    if (n == 0) throw ParameterError("n must be positive");
    if (!(sigma_T_sq > 0.0) || !std::isfinite(sigma_T_sq)) throw ParameterError("sigma_T_sq must be positive");
    const std::size_t l = opt.l == 0 ? n : opt.l;
    if (l > n) throw ParameterError("l must not exceed n");

    CounterRng rng(seed, 0);
    const double sd = std::sqrt(0.5 * sigma_T_sq);
    const double cap = 1.0 / std::numbers::sqrt2;
    auto component = [&]() {
        if (!opt.clamp) return sd * rng.normal();
        for (int attempt = 0; attempt < 1'000'000; ++attempt) {
            const double v = sd * rng.normal();
            if (v >= 0.0 && v <= cap) return v;
        }
        throw NumericError("clamped sampling: acceptance region has negligible probability");
    };

    TransmittanceVector tv;
    tv.l = l;
    tv.T.resize(n);
    for (auto& t : tv.T) {
        const double re = component();
        const double im = opt.symmetric ? re : component();
        t = {re, im};
    }
    tv.FT = dft(tv.T);
    tv.mag_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) tv.mag_norm[i] = std::norm(tv.FT[i]) / static_cast<double>(l);
    return tv;
}

void EavesdropperModel::validate() const {
    if (W.size() != T_eve_sq.size()) throw ParameterError("W and T_eve_sq lengths differ");
    for (double w : W)
        if (!(w >= 1.0) || !std::isfinite(w)) throw ParameterError("W entries must be >= 1");
    for (double t : T_eve_sq)
        if (!(t >= 0.0 && t < 1.0)) throw ParameterError("T_eve_sq entries must lie in [0, 1)");
}

EavesdropperModel eavesdropper_from_transmittance(const TransmittanceVector& tv, std::vector<double> W) {
    if (W.size() != tv.T.size()) throw ParameterError("W must have one entry per sub-channel");
    EavesdropperModel eve;
    eve.W = std::move(W);
    eve.T_eve_sq.resize(tv.T.size());
    for (std::size_t i = 0; i < tv.T.size(); ++i) {
        const double t2 = std::norm(tv.T[i]);
        if (t2 > 1.0) throw ParameterError("|T_i|^2 exceeds 1; sample with clamping to couple an eavesdropper");
        eve.T_eve_sq[i] = 1.0 - t2;
    }
    eve.validate();
    return eve;
}

std::vector<double> excess_noise(const EavesdropperModel& eve) {
    eve.validate();
    std::vector<double> N(eve.W.size());
    for (std::size_t i = 0; i < N.size(); ++i)
        N[i] = (eve.W[i] - 1.0) * eve.T_eve_sq[i] / (1.0 - eve.T_eve_sq[i]);
    return N;
}

cplx single_carrier_coefficient(std::span<const cplx> FT, std::span<const std::size_t> selected) {
    if (selected.empty()) throw ParameterError("empty selection");
    cplx sum{0.0, 0.0};
    for (auto i : selected) {
        if (i >= FT.size()) throw ParameterError("selected index out of range");
        sum += FT[i];
    }
    return sum / static_cast<double>(selected.size());
}

double single_carrier_gain(std::span<const cplx> FT, std::span<const std::size_t> selected) {
    if (selected.empty()) throw ParameterError("empty selection");
    double sum = 0.0;
    for (auto i : selected) {
        if (i >= FT.size()) throw ParameterError("selected index out of range");
        sum += std::norm(FT[i]);
    }
    return sum / static_cast<double>(selected.size());
}

double snr_star_term(double sigma_omega_sq, double ft_mag_sq, double sigma_x_sq) {
    const double a = sigma_omega_sq * ft_mag_sq;
    const double bracket = (a + sigma_x_sq) / (1.0 + sigma_x_sq * a) - 1.0;
    if (!(bracket > 0.0)) return 0.0;
    // SNR*_i = sigma_omega^2 / sigma_N*^2 with sigma_N*^2 = sigma_omega^2 / bracket.
    return bracket;
}

double snr_star(const ModulationConfig& cfg, const EavesdropperModel& eve, std::span<const double> ft_mag_sq,
                std::span<const std::size_t> selected) {
    cfg.validate();
    eve.validate();
    if (ft_mag_sq.size() != eve.W.size()) throw ParameterError("magnitude and eavesdropper lengths differ");
    const auto N = excess_noise(eve);
    double total = 0.0;
    for (auto i : selected) {
        if (i >= ft_mag_sq.size()) throw ParameterError("selected index out of range");
        if (!(ft_mag_sq[i] >= 0.0)) throw ParameterError("|F(T_i)|^2 must be nonnegative");
        total += snr_star_term(cfg.sigma_omega_sq, ft_mag_sq[i], cfg.sigma_0_sq + N[i]);
    }
    return total;
}

Threshold Threshold::at(double t_star_sq, std::size_t l) {
    if (!(t_star_sq >= 0.0)) throw ParameterError("threshold must be nonnegative");
    if (l == 0) throw ParameterError("l must be positive");
    Threshold t;
    t.t_star_sq = t_star_sq;
    t.lambda = static_cast<double>(l) * t_star_sq;
    t.l = l;
    return t;
}

Threshold fixed_threshold(std::span<const cplx> T_star, std::size_t l) {
    if (T_star.empty()) throw ParameterError("empty threshold vector");
    if (l == 0 || l > T_star.size()) throw ParameterError("need 1 <= l <= n");
    const auto F = dft(T_star);
    double sum = 0.0;
    for (std::size_t i = 0; i < l; ++i) sum += std::norm(F[i]);
    Threshold t;
    t.lambda = sum / static_cast<double>(l);
    t.t_star_sq = t.lambda / static_cast<double>(l);
    t.l = l;
    return t;
}

Threshold fallback_threshold(std::span<const double> mags, double mu, std::size_t l) {
    if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must lie in (0, 1)");
    if (mags.empty()) throw ParameterError("empty magnitude list");
    Threshold t = Threshold::at(mu * *std::max_element(mags.begin(), mags.end()), l);
    t.mu = mu;
    return t;
}

Threshold lambda_prime_threshold(const Threshold& base, std::span<const double> bad_mags) {
    if (bad_mags.empty()) throw ParameterError("empty bad-set magnitude list");
    const double lowest = *std::min_element(bad_mags.begin(), bad_mags.end());
    if (lowest > base.t_star_sq) throw ParameterError("bad-set magnitudes must not exceed the threshold");
    Threshold t = base;
    t.varpi = base.t_star_sq - lowest;
    t.lambda = base.lambda + static_cast<double>(base.l) * t.varpi;
    return t;
}

void write_transmittance_csv(std::ostream& os, const TransmittanceVector& tv) {
    CsvWriter w(os, {"index", "re", "im", "mag_norm"});
    for (std::size_t i = 0; i < tv.FT.size(); ++i) w.row(i, tv.FT[i].real(), tv.FT[i].imag(), tv.mag_norm[i]);
}

}  // namespace subchan
