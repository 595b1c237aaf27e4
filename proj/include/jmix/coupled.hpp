#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"
#include "jmix/jrm.hpp"
#include "jmix/parallel.hpp"
#include "jmix/resonant.hpp"
#include "jmix/sweep.hpp"
#include "jmix/twoport.hpp"

namespace jmix {

// Low-pass prototype g0..g5 of the two-pole-plus-load matching ladder.
struct PrototypeCoefficients {
    std::array<double, 6> g{};

    void validate() const {
        for (double v : g)
            if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("prototype coefficients must be positive");
    }
    friend bool operator==(const PrototypeCoefficients&, const PrototypeCoefficients&) = default;
};

enum class DeviceRole { amplifier, converter };

struct SynthesisSpec {
    JRMParams jrm;
    double ca = 0.0;
    double cb = 0.0;
    FluxBias design_flux = FluxBias::from_flux_quanta(0.6);
    std::array<double, 2> negative_resistance{}; // |R_a|, |R_b|, ohm
    std::array<double, 2> z2{50.0, 50.0};        // impedance of the second resonator per mode
    double z0 = 50.0;
    DeviceRole role = DeviceRole::amplifier;

    void validate() const {
        jrm.validate();
        if (!(ca > 0.0) || !(cb > 0.0)) throw domain_error("mode capacitances must be positive");
        for (double r : negative_resistance)
            if (!(r > 0.0)) throw domain_error("negative-resistance magnitudes must be positive");
        for (double z : z2)
            if (!(z > 0.0)) throw domain_error("intermediate impedances must be positive");
        if (!(z0 > 0.0)) throw domain_error("reference impedance must be positive");
    }
};

// One arm of the matching ladder, from the ring outward. Resonator 1 is the
// ring-facing node whose shunt capacitance is always 2 C_k.
struct ArmNetwork {
    std::array<double, 3> inductance{};  // L2, L3, L4
    std::array<double, 3> capacitance{}; // C2, C3, C4 (net, after absorbing the pi sections)
    std::array<double, 3> coupling{};    // C12, C23, C34

    friend bool operator==(const ArmNetwork&, const ArmNetwork&) = default;
};

enum class Provenance { synthesized, fitted };

struct Netlist {
    std::string name;
    Provenance provenance = Provenance::fitted;
    JRMParams jrm;
    double ca = 0.0;
    double cb = 0.0;
    double z0 = 50.0;
    std::array<ArmNetwork, 2> arms{};

    [[nodiscard]] double mode_capacitance(Mode m) const { return m == Mode::a ? ca : cb; }
    [[nodiscard]] const ArmNetwork& arm(Mode m) const { return arms[m == Mode::a ? 0 : 1]; }

    void validate() const {
        jrm.validate();
        if (!(ca > 0.0) || !(cb > 0.0) || !(z0 > 0.0)) throw domain_error("netlist capacitances and Z0 must be positive");
        for (const auto& arm : arms)
            for (const auto* group : {&arm.inductance, &arm.capacitance, &arm.coupling})
                for (double v : *group)
                    if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("netlist elements must be positive");
    }
    friend bool operator==(const Netlist&, const Netlist&) = default;
};

struct HalfCircuit {
    double inductance = 0.0;  // L_k
    double capacitance = 0.0; // C'_1k before the coupling section is added
    double frequency = 0.0;   // Hz
};

// Virtual-ground half of the differential mode: half the ring inductance in
// series with one outer inductor, shunted by 2 C_k.
[[nodiscard]] inline HalfCircuit half_circuit(const JRMParams& jrm, double c_k, FluxBias flux) {
    const double l = jrm.outer_inductance + 0.5 * jrm_inductance(jrm, flux);
    if (!(l > 0.0)) throw domain_error("half-circuit inductance is not positive at this flux");
    const double c = 2.0 * c_k;
    return {l, c, 1.0 / (two_pi * std::sqrt(l * c))};
}

struct ModeDesign {
    double frequency = 0.0; // Hz, self-consistent centre
    double fractional_bandwidth = 0.0;
    std::array<double, 4> impedance{}; // Z1..Z4
    std::array<double, 4> inverter{};  // J12, J23, J34, J45 (the last one absorbed)
};

struct SynthesisResult {
    Netlist netlist;
    std::array<ModeDesign, 2> design{};
};

namespace detail {
inline const char* mode_tag(int k) { return k == 0 ? "a" : "b"; }
} // namespace detail

[[nodiscard]] inline SynthesisResult synthesize(const SynthesisSpec& spec, const PrototypeCoefficients& proto) {
    spec.validate();
    proto.validate();
    const auto& g = proto.g;
    SynthesisResult out;
    out.netlist.name = "synthesized";
    out.netlist.provenance = Provenance::synthesized;
    out.netlist.jrm = spec.jrm;
    out.netlist.ca = spec.ca;
    out.netlist.cb = spec.cb;
    out.netlist.z0 = spec.z0;
    for (int k = 0; k < 2; ++k) {
        const double c_mode = k == 0 ? spec.ca : spec.cb;
        const auto hc = half_circuit(spec.jrm, c_mode, spec.design_flux);
        const double lk = hc.inductance, r = spec.negative_resistance[k], z2 = spec.z2[k];

        // Centre frequency closes the first node: L_k resonates with 2C_k + C12
        // at w, where C12 itself depends on w through Z1 = w L_k.
        // C12 scales as w^-1/2, so the iteration contracts quickly.
        double w = two_pi * hc.frequency;
        for (int it = 0; it < 200; ++it) {
            const double z1 = w * lk;
            const double j12 = g[0] * g[1] * z1 / r / std::sqrt(g[1] * g[2] * z1 * z2);
            const double w_next = 1.0 / std::sqrt(lk * (2.0 * c_mode + j12 / w));
            const bool done = std::abs(w_next - w) <= 1e-15 * w;
            w = w_next;
            if (done) break;
        }
        ModeDesign d;
        const double z1 = w * lk;
        const double bw = g[0] * g[1] * z1 / r;
        const double z4 = bw * spec.z0 / (g[4] * g[5]);
        const double z3 = std::sqrt(z2 * z4);
        d.impedance = {z1, z2, z3, z4};
        d.fractional_bandwidth = bw;
        d.inverter = {bw / std::sqrt(g[1] * g[2] * z1 * z2), bw / std::sqrt(g[2] * g[3] * z2 * z3),
                      bw / std::sqrt(g[3] * g[4] * z3 * z4), std::sqrt(bw / (g[4] * g[5] * z4 * spec.z0))};
        d.frequency = w / two_pi;

        ArmNetwork arm;
        for (int i = 0; i < 3; ++i) arm.coupling[i] = d.inverter[i] / w;
        for (int i = 0; i < 3; ++i) arm.inductance[i] = d.impedance[i + 1] / w;
        std::array<double, 3> loaded{};
        for (int i = 0; i < 3; ++i) loaded[i] = 1.0 / (w * d.impedance[i + 1]);
        arm.capacitance[0] = loaded[0] - arm.coupling[0] - arm.coupling[1];
        arm.capacitance[1] = loaded[1] - arm.coupling[1] - arm.coupling[2];
        arm.capacitance[2] = loaded[2] - arm.coupling[2];
        for (int i = 0; i < 3; ++i) {
            if (!(arm.capacitance[i] > 0.0)) {
                const std::string stage = "C_" + std::to_string(i + 2) + "," + detail::mode_tag(k);
                throw synthesis_infeasible_error(stage, "net shunt capacitance " + stage +
                                                            " is not positive; the coupling sections cannot be absorbed");
            }
        }
        out.netlist.arms[k] = arm;
        out.design[k] = d;
    }
    return out;
}

[[nodiscard]] inline double resolve_coupled_alpha(const Netlist& n, const WorkingPoint& wp) {
    if (auto a = std::get_if<PumpAlpha>(&wp.strength)) return a->value;
    if (std::holds_alternative<PumpRho>(wp.strength))
        throw domain_error("rho is defined only for the resonant model; give alpha or a pump current");
    const double i_p = std::get<PumpCurrent>(wp.strength).amps;
    const double la = half_circuit(n.jrm, n.ca, wp.flux).inductance;
    const double lb = half_circuit(n.jrm, n.cb, wp.flux).inductance;
    const double a = alpha_from_modulation(mutual_modulation(n.jrm, wp.flux, i_p, RingModel::half), la, lb);
    if (a >= 1.0) throw domain_error("pump current drives alpha to 1 or beyond");
    return a;
}

namespace detail {
// Ladder from the port inward (LC4, C34, LC3, C23, LC2, C12), ending before
// the ring-facing resonator.
inline TwoPortMatrix outer_ladder(const ArmNetwork& arm, double f, bool conjugate) {
    auto lc = [&](int i) {
        auto t = abcd_parallel_lc(arm.inductance[i], arm.capacitance[i], f);
        return conjugate ? t.conj() : t;
    };
    auto cc = [&](int i) {
        auto t = abcd_series_capacitor(arm.coupling[i], f);
        return conjugate ? t.conj() : t;
    };
    return cascade({lc(2), cc(2), lc(1), cc(1), lc(0), cc(0)});
}

inline TwoPortMatrix reversed(const TwoPortMatrix& t) {
    // Same network seen from the other side (valid for reciprocal t).
    return {t.d, t.b, t.c, t.a};
}
} // namespace detail

[[nodiscard]] inline TwoPortMatrix coupled_cascade(const Netlist& n, const WorkingPoint& wp, double f_signal,
                                                   MixingMode mode) {
    const double alpha = resolve_coupled_alpha(n, wp);
    if (!(alpha > 0.0)) throw domain_error("alpha = 0 has no inverter; use coupled_response for the bypass");
    const double f2 = idler_frequency(f_signal, wp.pump_frequency, mode);
    const bool amp = mode == MixingMode::amplification;
    const double la = half_circuit(n.jrm, n.ca, wp.flux).inductance;
    const double lb = half_circuit(n.jrm, n.cb, wp.flux).inductance;
    auto first_b = abcd_parallel_lc(lb * (1.0 - alpha), 2.0 * n.cb, f2);
    auto side_b = detail::reversed(detail::outer_ladder(n.arms[1], f2, false));
    if (amp) {
        first_b = first_b.conj();
        side_b = side_b.conj();
    }
    return cascade({detail::outer_ladder(n.arms[0], f_signal, false),
                    abcd_parallel_lc(la * (1.0 - alpha), 2.0 * n.ca, f_signal),
                    abcd_jrm_inverter(pumped_inverter(la, lb, alpha, f_signal, f2, wp.pump_phase), mode), first_b,
                    side_b});
}

[[nodiscard]] inline ScatteringPair coupled_response(const Netlist& n, const WorkingPoint& wp, double f_signal,
                                                     MixingMode mode) {
    const double alpha = resolve_coupled_alpha(n, wp);
    if (alpha > 0.0) return abcd_to_s(coupled_cascade(n, wp, f_signal, mode), n.z0);
    const double f2 = idler_frequency(f_signal, wp.pump_frequency, mode);
    auto one_port = [&](int k, double f, bool conj) {
        const double l = half_circuit(n.jrm, k == 0 ? n.ca : n.cb, wp.flux).inductance;
        auto t = detail::outer_ladder(n.arms[k], f, false) * abcd_parallel_lc(l, 2.0 * (k == 0 ? n.ca : n.cb), f);
        // Open-circuit termination: Z_in = A / C.
        const cplx zin = t.a / t.c;
        const cplx g = (zin - n.z0) / (zin + n.z0);
        return conj ? std::conj(g) : g;
    };
    return {one_port(0, f_signal, false), 0.0, 0.0, one_port(1, f2, mode == MixingMode::amplification), n.z0};
}

[[nodiscard]] inline SweepResult coupled_sparams(const Netlist& n, const WorkingPoint& wp,
                                                 const std::vector<double>& grid, MixingMode mode) {
    n.validate();
    wp.validate();
    require_increasing(grid, "frequency grid");
    if (!(grid.front() > 0.0)) throw domain_error("frequencies must be positive");
    for (double f : {grid.front(), grid.back()}) (void)idler_frequency(f, wp.pump_frequency, mode);
    const double alpha = resolve_coupled_alpha(n, wp);
    const WorkingPoint fixed{wp.flux, wp.pump_frequency, PumpAlpha{alpha}, wp.pump_phase};
    auto out = SweepResult::with_scattering_labels(grid);
    parallel_for(grid.size(), [&](std::size_t i) {
        out.idler_freq[i] = idler_frequency(grid[i], wp.pump_frequency, mode);
        try {
            out.set_point(i, coupled_response(n, fixed, grid[i], mode));
        } catch (const singular_network_error&) {
            const double nan = std::nan("");
            out.set_point(i, {cplx{nan, nan}, cplx{nan, nan}, cplx{nan, nan}, cplx{nan, nan}, n.z0});
            out.singular[i] = 1;
        }
    });
    echo_working_point(out, wp, alpha, mode);
    return out;
}

// Weak conversion probe used to read resonances off the reflection phase.
struct ResonanceProbe {
    double pump_frequency = 3e9;
    double alpha = 1e-3;
};

// Reflection phase at port frequency f. For port b, f is the idler frequency
// and the signal sits at f - f_p.
[[nodiscard]] inline double reflection_phase(const Netlist& n, FluxBias flux, Mode port, double f,
                                             const ResonanceProbe& probe) {
    const WorkingPoint wp{flux, probe.pump_frequency, PumpAlpha{probe.alpha}, 0.0};
    if (port == Mode::a) return std::arg(coupled_response(n, wp, f, MixingMode::conversion).s11);
    const double f1 = f - probe.pump_frequency;
    if (!(f1 > 0.0)) throw domain_error("port-b probe frequency must exceed the probe pump frequency");
    return std::arg(coupled_response(n, wp, f1, MixingMode::conversion).s22);
}

[[nodiscard]] inline double reflection_phase(const ResonantJMParams& p, FluxBias flux, Mode port, double f,
                                             const ResonanceProbe& probe) {
    const WorkingPoint wp{flux, probe.pump_frequency, PumpAlpha{probe.alpha}, 0.0};
    if (port == Mode::a) return std::arg(pumped_response(p, wp, f, MixingMode::conversion).s11);
    const double f1 = f - probe.pump_frequency;
    if (!(f1 > 0.0)) throw domain_error("port-b probe frequency must exceed the probe pump frequency");
    return std::arg(pumped_response(p, wp, f1, MixingMode::conversion).s22);
}

// Flux x frequency reflection-phase grid, row-major by flux.
template <class Device>
[[nodiscard]] PhaseMap resonance_map(const Device& device, const std::vector<double>& flux_phi0,
                                     const std::vector<double>& freq, Mode port, const ResonanceProbe& probe = {}) {
    require_increasing(flux_phi0, "flux grid");
    require_increasing(freq, "frequency grid");
    PhaseMap map{flux_phi0, freq, std::vector<double>(flux_phi0.size() * freq.size())};
    parallel_for(map.phase.size(), [&](std::size_t idx) {
        const std::size_t r = idx / freq.size(), c = idx % freq.size();
        map.phase[idx] = reflection_phase(device, FluxBias::from_flux_quanta(flux_phi0[r]), port, freq[c], probe);
    });
    return map;
}

namespace detail {
// A sign change between two wrapped phase samples passes through zero only if
// that is the shorter way round; otherwise the trace wrapped through +-pi.
inline bool crosses_zero(double p0, double p1) {
    return (p0 < 0.0) != (p1 < 0.0) && std::abs(p0) + std::abs(p1) < std::numbers::pi;
}
} // namespace detail

// Zero-phase crossings of a sampled phase trace.
[[nodiscard]] inline std::vector<double> zero_phase_crossings(const std::vector<double>& f,
                                                              const std::vector<double>& phase) {
    std::vector<double> out;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double p0 = phase[i - 1], p1 = phase[i];
        if (p0 == 0.0) {
            out.push_back(f[i - 1]);
            continue;
        }
        if (detail::crosses_zero(p0, p1) && p1 != 0.0) out.push_back(f[i - 1] + (0.0 - p0) * (f[i] - f[i - 1]) / (p1 - p0));
    }
    if (!phase.empty() && phase.back() == 0.0) out.push_back(f.back());
    return out;
}

// Resonances of one port at one flux: coarse scan followed by bracketed
// refinement, so the result is a smooth function of the circuit values.
template <class Device>
[[nodiscard]] std::vector<double> port_resonances(const Device& device, FluxBias flux, Mode port, double f_lo,
                                                  double f_hi, std::size_t coarse_points,
                                                  const ResonanceProbe& probe = {}) {
    const auto grid = linspace(f_lo, f_hi, coarse_points);
    std::vector<double> ph(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ph[i] = reflection_phase(device, flux, port, grid[i], probe);
    std::vector<double> out;
    auto phase_at = [&](double f) { return reflection_phase(device, flux, port, f, probe); };
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double p0 = ph[i - 1], p1 = ph[i];
        if (p0 == 0.0) {
            out.push_back(grid[i - 1]);
            continue;
        }
        if (!detail::crosses_zero(p0, p1) || p1 == 0.0) continue;
        std::uintmax_t iters = 60;
        auto r = boost::math::tools::toms748_solve(phase_at, grid[i - 1], grid[i], p0, p1,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
        const double root = 0.5 * (r.first + r.second);
        // A coarse step that straddles a wrap can still bracket the jump itself.
        if (std::abs(phase_at(root)) < 1e-3) out.push_back(root);
    }
    return out;
}

} // namespace jmix
