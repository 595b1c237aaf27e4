#pragma once

#include <cmath>
#include <complex>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"

namespace jmix {

// Router + cable between the device and the readout. All amplitudes real and
// frequency independent.
struct RippleSetup {
    double t21 = 1.0;  // router: input -> device port
    double t32 = 1.0;  // router: device port -> output
    double t31 = 0.0;  // router leakage input -> output
    double tc = 1.0;   // one-way cable transmission
    double r22 = 0.0;  // router reflection seen from the device side
    double cable_length = 0.0; // m
    double permittivity = 1.0;

    void validate() const {
        for (double v : {t21, t32, t31, tc, r22})
            if (!(v >= 0.0 && v <= 1.0)) throw domain_error("router amplitudes must lie in [0, 1]");
        if (!(cable_length >= 0.0)) throw domain_error("cable length must be nonnegative");
        if (!(permittivity >= 1.0)) throw domain_error("permittivity must be at least 1");
    }
};

[[nodiscard]] inline double cable_phase(const RippleSetup& s, double f) {
    return two_pi * f * std::sqrt(s.permittivity) * s.cable_length / PhysicalConstants::light_speed;
}

// Reflection seen at the router output given the bare device reflection.
[[nodiscard]] inline std::complex<double> effective_reflection(const RippleSetup& s, std::complex<double> device_s,
                                                               double f) {
    const std::complex<double> loop = s.tc * s.tc * std::polar(1.0, 2.0 * cable_phase(s, f));
    if (!(std::abs(s.r22 * device_s * loop) < 1.0))
        throw divergence_error("cable loop gain reaches unity; the multiple-reflection series diverges");
    return s.t31 + s.t32 * s.t21 * loop * device_s / (1.0 - s.r22 * device_s * loop);
}

// Free spectral range of the cable round trip.
[[nodiscard]] inline double ripple_spacing(const RippleSetup& s) {
    if (!(s.cable_length > 0.0)) throw domain_error("cable length must be positive");
    return PhysicalConstants::light_speed / (2.0 * std::sqrt(s.permittivity) * s.cable_length);
}

[[nodiscard]] inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

// |S_on / S_off|^2 with both device reflections passed through the setup.
[[nodiscard]] inline double normalized_response(const RippleSetup& s, std::complex<double> device_on,
                                                std::complex<double> device_off, double f) {
    return std::norm(effective_reflection(s, device_on, f) / effective_reflection(s, device_off, f));
}

[[nodiscard]] inline RippleSetup reference_ripple_setup() { return {0.95, 0.95, 0.1, 0.95, 0.17, 1.1, 2.1}; }

} // namespace jmix
