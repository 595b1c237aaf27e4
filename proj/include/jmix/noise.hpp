#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"
#include "jmix/optimize.hpp"

namespace jmix {

struct NoiseChainParams {
    static constexpr double vacuum_photons = 0.5;
    double chain_temperature = 0.0;   // T_N, K
    double added_photons = 0.0;       // n_add
    double quantum_temperature = 0.0; // T_Q = hbar w / k_B, K

    void validate() const {
        if (!(chain_temperature > 0.0)) throw domain_error("chain noise temperature must be positive");
        if (!(added_photons >= 0.0)) throw domain_error("added noise must be nonnegative");
        if (!(quantum_temperature > 0.0)) throw domain_error("quantum temperature must be positive");
    }
};

[[nodiscard]] inline double quantum_temperature(double f_mode) {
    return PhysicalConstants::reduced_planck * two_pi * f_mode / PhysicalConstants::boltzmann;
}

// Output noise with the pump on relative to pump off.
[[nodiscard]] inline double noise_rise(const NoiseChainParams& p, double gain) {
    if (!(gain >= 1.0)) throw domain_error("gain must be at least 1");
    const double tq = p.quantum_temperature;
    return (p.chain_temperature + gain * tq * NoiseChainParams::vacuum_photons + (gain - 1.0) * tq * p.added_photons) /
           (p.chain_temperature + tq);
}

[[nodiscard]] inline double snr_improvement(const NoiseChainParams& p, double gain) { return gain / noise_rise(p, gain); }

// Large-gain limit of the SNR improvement.
[[nodiscard]] inline double snr_plateau(const NoiseChainParams& p) {
    return (p.chain_temperature + p.quantum_temperature) /
           (p.quantum_temperature * (NoiseChainParams::vacuum_photons + p.added_photons));
}

struct NoiseSample {
    double gain = 1.0;       // power ratio
    double noise_rise = 1.0; // power ratio
    friend bool operator<(const NoiseSample& l, const NoiseSample& r) {
        return l.gain != r.gain ? l.gain < r.gain : l.noise_rise < r.noise_rise;
    }
};

struct NoiseFit {
    NoiseChainParams params;
    double rms_relative_residual = 0.0;
    // Ratio of the smallest to the largest singular value of the scaled
    // residual Jacobian at the optimum; near zero means T_N and n_add trade off.
    double confidence = 0.0;
    bool converged = false;
    int evaluations = 0;
};

struct NoiseFitOptions {
    double chain_temperature_min = 1.0, chain_temperature_max = 20.0;
    double added_photons_min = 0.0, added_photons_max = 5.0;
    double degeneracy_threshold = 1e-6;
    SimplexOptions simplex{5, 7, 4000, 1e-13, 0.3, 3, true};
};

[[nodiscard]] inline NoiseFit fit_noise(std::vector<NoiseSample> data, double f_mode, const NoiseFitOptions& opt = {}) {
    if (data.size() < 3) throw fit_degenerate_error("noise fit needs at least three (gain, noise rise) points");
    for (const auto& s : data)
        if (!(s.gain >= 1.0) || !(s.noise_rise > 0.0) || !std::isfinite(s.gain * s.noise_rise))
            throw domain_error("noise samples need gain >= 1 and positive noise rise");
    std::sort(data.begin(), data.end());
    if (10.0 * std::log10(data.back().gain / data.front().gain) < 10.0)
        throw fit_degenerate_error("gain span below 10 dB cannot separate T_N from n_add");
    if (!(f_mode > 0.0)) throw domain_error("mode frequency must be positive");
    const double tq = quantum_temperature(f_mode);

    auto residuals = [&](double tn, double nadd, std::vector<double>& r) {
        const NoiseChainParams p{tn, nadd, tq};
        r.resize(data.size());
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double target = data[k].gain / data[k].noise_rise;
            r[k] = (snr_improvement(p, data[k].gain) - target) / target;
        }
    };
    auto loss = [&](const std::vector<double>& x) {
        std::vector<double> r;
        residuals(x[0], x[1], r);
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    };
    const std::vector<double> lo{opt.chain_temperature_min, opt.added_photons_min};
    const std::vector<double> hi{opt.chain_temperature_max, opt.added_photons_max};
    const std::vector<double> x0{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
    const auto res = minimize_bounded(loss, x0, lo, hi, opt.simplex);

    NoiseFit out;
    out.params = {res.x[0], res.x[1], tq};
    out.rms_relative_residual = std::sqrt(res.value / static_cast<double>(data.size()));
    out.converged = res.converged;
    out.evaluations = res.evaluations;

    // Jacobian columns scaled by the box widths.
    std::vector<double> r0, r1, c0(data.size()), c1(data.size());
    const double h0 = 1e-6 * (hi[0] - lo[0]), h1 = 1e-6 * (hi[1] - lo[1]);
    residuals(res.x[0] + h0, res.x[1], r1);
    residuals(res.x[0] - h0, res.x[1], r0);
    for (std::size_t k = 0; k < data.size(); ++k) c0[k] = (r1[k] - r0[k]) / 2e-6;
    residuals(res.x[0], res.x[1] + h1, r1);
    residuals(res.x[0], res.x[1] - h1, r0);
    for (std::size_t k = 0; k < data.size(); ++k) c1[k] = (r1[k] - r0[k]) / 2e-6;
    double a = 0, b = 0, d = 0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        a += c0[k] * c0[k];
        b += c0[k] * c1[k];
        d += c1[k] * c1[k];
    }
    const double mean = 0.5 * (a + d), spread = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    const double emax = mean + spread, emin = std::max(0.0, mean - spread);
    out.confidence = emax > 0.0 ? std::sqrt(emin / emax) : 0.0;
    if (out.confidence < opt.degeneracy_threshold)
        throw fit_degenerate_error("noise data leave a flat residual valley between T_N and n_add");
    return out;
}

} // namespace jmix
