#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"
#include "jmix/jrm.hpp"
#include "jmix/parallel.hpp"
#include "jmix/sweep.hpp"
#include "jmix/twoport.hpp"

namespace jmix {

enum class Mode { a, b };

// Resonant-mode mixer: each mode is the ring shunted by its own capacitor and
// the two outer inductors.
struct ResonantJMParams {
    JRMParams jrm;
    double ca = 0.0; // F
    double cb = 0.0; // F
    double z0 = 50.0;
    // Optional per-mode shunt conductance (S) for lossy experiments.
    double loss_a = 0.0;
    double loss_b = 0.0;

    void validate() const {
        jrm.validate();
        if (!(ca > 0.0) || !(cb > 0.0)) throw domain_error("mode capacitances must be positive");
        if (!(z0 > 0.0)) throw domain_error("reference impedance must be positive");
        if (loss_a < 0.0 || loss_b < 0.0) throw domain_error("loss conductances must be nonnegative");
    }
    [[nodiscard]] double capacitance(Mode m) const { return m == Mode::a ? ca : cb; }
    [[nodiscard]] double loss(Mode m) const { return m == Mode::a ? loss_a : loss_b; }
};

[[nodiscard]] inline double mode_inductance(const ResonantJMParams& p, FluxBias flux) {
    const double l = 2.0 * p.jrm.outer_inductance + jrm_inductance(p.jrm, flux);
    if (!(l > 0.0)) throw domain_error("mode inductance is not positive at this flux");
    return l;
}

[[nodiscard]] inline double mode_frequency(const ResonantJMParams& p, FluxBias flux, Mode m) {
    return 1.0 / (two_pi * std::sqrt(mode_inductance(p, flux) * p.capacitance(m)));
}

[[nodiscard]] inline double mode_impedance(const ResonantJMParams& p, FluxBias flux, Mode m) {
    return std::sqrt(mode_inductance(p, flux) / p.capacitance(m));
}

[[nodiscard]] inline double external_q(const ResonantJMParams& p, FluxBias flux, Mode m) {
    return p.z0 / mode_impedance(p, flux, m);
}

[[nodiscard]] inline double stability_product(const ResonantJMParams& p, FluxBias flux, double participation) {
    return participation * participation * external_q(p, flux, Mode::a) * external_q(p, flux, Mode::b);
}

// Pump-off linewidth gamma_k = 1/(Z0 C_k), returned in Hz.
[[nodiscard]] inline double linear_bandwidth(const ResonantJMParams& p, Mode m) {
    return 1.0 / (two_pi * p.z0 * p.capacitance(m));
}

// Amplitude-gain bandwidth limit B = gamma / sqrt(G) with gamma the harmonic
// mean of the two linewidths. Inputs and output share units.
[[nodiscard]] inline double gain_bandwidth_check(double gamma_a, double gamma_b, double power_gain) {
    if (!(gamma_a > 0.0) || !(gamma_b > 0.0) || !(power_gain > 0.0))
        throw domain_error("gain-bandwidth inputs must be positive");
    return 2.0 * gamma_a * gamma_b / (gamma_a + gamma_b) / std::sqrt(power_gain);
}

[[nodiscard]] inline double idler_frequency(double f_signal, double f_pump, MixingMode mode) {
    const double f2 = mode == MixingMode::conversion ? f_signal + f_pump : f_pump - f_signal;
    if (!(f2 > 0.0)) throw domain_error("idler frequency is not positive for this signal/pump pair");
    return f2;
}

// Inverter strengths of the pumped ring between two resonators with
// inductances la, lb, for dressing alpha = dM^2 / (4 la lb).
[[nodiscard]] inline InverterStrength pumped_inverter(double la, double lb, double alpha, double f1, double f2,
                                                      double pump_phase) {
    const double lad = la * (1.0 - alpha), lbd = lb * (1.0 - alpha);
    const double k = std::sqrt(alpha) / std::sqrt(lad * lbd);
    return {k / (two_pi * f1), k / (two_pi * f2), pump_phase};
}

[[nodiscard]] inline double alpha_from_modulation(double delta_m, double la, double lb) {
    return delta_m * delta_m / (4.0 * la * lb);
}

// Dimensionless pump amplitude of the closed-form converter, evaluated on
// the dressed resonances: rho^2 = J1 J2 Z0^2.
[[nodiscard]] inline double rho_from_alpha(const ResonantJMParams& p, FluxBias flux, double alpha) {
    const double l = mode_inductance(p, flux) * (1.0 - alpha);
    const double wa = 1.0 / std::sqrt(l * p.ca), wb = 1.0 / std::sqrt(l * p.cb);
    return std::sqrt(alpha / (wa * wb * l * l)) * p.z0;
}

[[nodiscard]] inline double alpha_from_rho(const ResonantJMParams& p, FluxBias flux, double rho) {
    if (rho < 0.0) throw domain_error("rho must be nonnegative");
    if (rho == 0.0) return 0.0;
    auto f = [&](double a) { return rho_from_alpha(p, flux, a) - rho; };
    double hi = 0.5;
    if (f(hi) < 0.0) hi = 1.0 - 1e-12;
    if (f(hi) < 0.0) throw domain_error("rho is beyond the reach of any alpha < 1");
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, 0.0, hi, -rho, f(hi), boost::math::tools::eps_tolerance<double>(50),
                                               iters);
    return 0.5 * (r.first + r.second);
}

[[nodiscard]] inline double resolve_alpha(const ResonantJMParams& p, const WorkingPoint& wp) {
    if (auto a = std::get_if<PumpAlpha>(&wp.strength)) return a->value;
    if (auto r = std::get_if<PumpRho>(&wp.strength)) return alpha_from_rho(p, wp.flux, r->value);
    const double i_p = std::get<PumpCurrent>(wp.strength).amps;
    const double l = mode_inductance(p, wp.flux);
    const double a = alpha_from_modulation(mutual_modulation(p.jrm, wp.flux, i_p, RingModel::full), l, l);
    if (a >= 1.0) throw domain_error("pump current drives alpha to 1 or beyond");
    return a;
}

namespace detail {
inline cplx resonator_admittance(double l, double c, double g, double f, bool conjugate) {
    const cplx y = parallel_lc_admittance(l, c, f) + g;
    return conjugate ? std::conj(y) : y;
}
} // namespace detail

[[nodiscard]] inline TwoPortMatrix build_cascade(const ResonantJMParams& p, const WorkingPoint& wp, double f_signal,
                                                 MixingMode mode) {
    const double alpha = resolve_alpha(p, wp);
    if (!(alpha > 0.0)) throw domain_error("alpha = 0 has no inverter; use pumped_response for the bypass");
    const double l = mode_inductance(p, wp.flux);
    const double f2 = idler_frequency(f_signal, wp.pump_frequency, mode);
    const double ld = l * (1.0 - alpha);
    const bool amp = mode == MixingMode::amplification;
    const auto inv = pumped_inverter(l, l, alpha, f_signal, f2, wp.pump_phase);
    return cascade({abcd_shunt_admittance(detail::resonator_admittance(ld, p.ca, p.loss_a, f_signal, false)),
                    abcd_jrm_inverter(inv, mode),
                    abcd_shunt_admittance(detail::resonator_admittance(ld, p.cb, p.loss_b, f2, amp))});
}

// Power-wave scattering at one signal frequency. With no pump the two modes
// are separate one-ports terminated by the bare resonators.
[[nodiscard]] inline ScatteringPair pumped_response(const ResonantJMParams& p, const WorkingPoint& wp, double f_signal,
                                                    MixingMode mode) {
    const double alpha = resolve_alpha(p, wp);
    if (alpha > 0.0) return abcd_to_s(build_cascade(p, wp, f_signal, mode), p.z0);
    const double l = mode_inductance(p, wp.flux);
    const double f2 = idler_frequency(f_signal, wp.pump_frequency, mode);
    const double g0 = 1.0 / p.z0;
    const cplx ya = detail::resonator_admittance(l, p.ca, p.loss_a, f_signal, false);
    const cplx yb = detail::resonator_admittance(l, p.cb, p.loss_b, f2, mode == MixingMode::amplification);
    return {(g0 - ya) / (g0 + ya), 0.0, 0.0, (g0 - yb) / (g0 + yb), p.z0};
}

inline void echo_working_point(SweepResult& r, const WorkingPoint& wp, double alpha, MixingMode mode) {
    r.working_point["flux_phi0"] = wp.flux.in_flux_quanta();
    r.working_point["pump_frequency_hz"] = wp.pump_frequency;
    r.working_point["pump_phase_rad"] = wp.pump_phase;
    r.working_point["alpha"] = alpha;
    r.working_point["amplification"] = mode == MixingMode::amplification ? 1.0 : 0.0;
}

// Pumped sweep; points at the instability threshold are flagged and carry NaN.
[[nodiscard]] inline SweepResult sparams(const ResonantJMParams& p, const WorkingPoint& wp,
                                         const std::vector<double>& grid, MixingMode mode) {
    p.validate();
    wp.validate();
    require_increasing(grid, "frequency grid");
    const double alpha = resolve_alpha(p, wp);
    for (double f : {grid.front(), grid.back()}) (void)idler_frequency(f, wp.pump_frequency, mode);
    if (!(grid.front() > 0.0)) throw domain_error("frequencies must be positive");
    auto out = SweepResult::with_scattering_labels(grid);
    const WorkingPoint fixed{wp.flux, wp.pump_frequency, PumpAlpha{alpha}, wp.pump_phase};
    parallel_for(grid.size(), [&](std::size_t i) {
        out.idler_freq[i] = idler_frequency(grid[i], wp.pump_frequency, mode);
        try {
            out.set_point(i, pumped_response(p, fixed, grid[i], mode));
        } catch (const singular_network_error&) {
            const double nan = std::nan("");
            out.set_point(i, {cplx{nan, nan}, cplx{nan, nan}, cplx{nan, nan}, cplx{nan, nan}, p.z0});
            out.singular[i] = 1;
        }
    });
    echo_working_point(out, wp, alpha, mode);
    return out;
}

// One-point calibration of the closed-form pump amplitude: match the
// transfer-matrix reflection at the given signal frequency.
[[nodiscard]] inline double calibrate_rho(const ResonantJMParams& p, const WorkingPoint& wp, double f_signal,
                                          MixingMode mode) {
    const double s = pumped_response(p, wp, f_signal, mode).s11.real();
    const double r2 = mode == MixingMode::conversion ? (1.0 - s) / (1.0 + s) : (s - 1.0) / (s + 1.0);
    if (!(r2 >= 0.0)) throw domain_error("calibration point is not a resonance of the pumped network");
    return std::sqrt(r2);
}

} // namespace jmix
