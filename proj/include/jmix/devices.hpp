#pragma once

#include "jmix/coupled.hpp"
#include "jmix/resonant.hpp"

// Reference devices: the fitted parameter sets of the four fabricated mixers
// and the prototype coefficients used to design the coupled ones.
namespace jmix::devices {

inline constexpr double pico_h = 1e-12;
inline constexpr double pico_f = 1e-12;
inline constexpr double nano_h = 1e-9;

[[nodiscard]] inline JRMParams resonant_ring() { return {8.1e-6, 10 * pico_h, 11.3 * pico_h, 27 * pico_h}; }
[[nodiscard]] inline JRMParams coupled_ring() { return {2.5e-6, 10 * pico_h, 30 * pico_h, 9 * pico_h}; }

[[nodiscard]] inline ResonantJMParams jm1() { return {resonant_ring(), 6.1 * pico_f, 3.13 * pico_f, 50.0}; }
[[nodiscard]] inline ResonantJMParams jm2() { return {resonant_ring(), 5.85 * pico_f, 3.13 * pico_f, 50.0}; }

[[nodiscard]] inline Netlist jm3() {
    Netlist n;
    n.name = "JM3";
    n.provenance = Provenance::fitted;
    n.jrm = coupled_ring();
    n.ca = 6.276 * pico_f;
    n.cb = 3.217 * pico_f;
    n.arms[0] = {{1.17 * nano_h, 0.597 * nano_h, 0.302 * nano_h},
                 {0.13 * pico_f, 0.573 * pico_f, 1.585 * pico_f},
                 {0.215 * pico_f, 0.052 * pico_f, 0.171 * pico_f}};
    n.arms[1] = {{0.8 * nano_h, 0.333 * nano_h, 0.132 * nano_h},
                 {0.177 * pico_f, 0.575 * pico_f, 1.751 * pico_f},
                 {0.101 * pico_f, 0.03 * pico_f, 0.124 * pico_f}};
    return n;
}

[[nodiscard]] inline Netlist jm4() {
    Netlist n;
    n.name = "JM4";
    n.provenance = Provenance::fitted;
    n.jrm = coupled_ring();
    n.ca = 6.287 * pico_f;
    n.cb = 3.219 * pico_f;
    n.arms[0] = {{1.131 * nano_h, 0.575 * nano_h, 0.292 * nano_h},
                 {0.12 * pico_f, 0.582 * pico_f, 1.517 * pico_f},
                 {0.239 * pico_f, 0.073 * pico_f, 0.219 * pico_f}};
    n.arms[1] = {{0.804 * nano_h, 0.343 * nano_h, 0.146 * nano_h},
                 {0.171 * pico_f, 0.561 * pico_f, 1.616 * pico_f},
                 {0.106 * pico_f, 0.04 * pico_f, 0.142 * pico_f}};
    return n;
}

[[nodiscard]] inline PrototypeCoefficients jm3_prototype() { return {{1.0, 0.76, 1.031, 1.09, 0.34, 1.1055}}; }
[[nodiscard]] inline PrototypeCoefficients jm4_prototype() { return {{1.0, 0.78, 1.1, 0.75, 0.45, 0.93}}; }
[[nodiscard]] inline PrototypeCoefficients chebyshev_start() { return {{1.0, 0.7629, 1.031, 1.1032, 0.3999, 1.1055}}; }

[[nodiscard]] inline SynthesisSpec coupled_spec(const Netlist& like, DeviceRole role) {
    SynthesisSpec s;
    s.jrm = like.jrm;
    s.ca = like.ca;
    s.cb = like.cb;
    s.negative_resistance = {15.0, 30.0};
    s.role = role;
    return s;
}

} // namespace jmix::devices
