#pragma once

#include <cmath>
#include <string>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"

namespace jmix {

// Shunted Josephson ring modulator. All values SI.
struct JRMParams {
    double critical_current = 0.0;   // I0, A
    double stray_inductance = 0.0;   // Ls, H
    double shunt_inductance = 0.0;   // Lin, H
    double outer_inductance = 0.0;   // Lout, H

    [[nodiscard]] double josephson_inductance0() const {
        return PhysicalConstants::reduced_flux_quantum / critical_current;
    }
    // Ls / LJ0: small parameter of the junction-phase expansion.
    [[nodiscard]] double stray_ratio() const { return stray_inductance / josephson_inductance0(); }
    // LJ0 / Lin: dilution of the junction nonlinearity by the inner shunts.
    [[nodiscard]] double dilution() const { return josephson_inductance0() / shunt_inductance; }

    void validate() const {
        if (!(critical_current > 0.0) || !(stray_inductance > 0.0) || !(shunt_inductance > 0.0) ||
            !(outer_inductance > 0.0))
            throw domain_error("ring parameters must all be strictly positive and finite");
        if (!std::isfinite(critical_current + stray_inductance + shunt_inductance + outer_inductance))
            throw domain_error("ring parameters must be finite");
        if (stray_ratio() >= 1.0)
            throw domain_error("stray inductance must be smaller than the bare junction inductance");
    }

    friend bool operator==(const JRMParams&, const JRMParams&) = default;
};

// External flux as the reduced phase phi_e = Phi_e / phi0.
struct FluxBias {
    double phi_e = 0.0;

    [[nodiscard]] static FluxBias from_flux_quanta(double phi0_units) { return {two_pi * phi0_units}; }
    [[nodiscard]] double in_flux_quanta() const { return phi_e / two_pi; }
};

struct ModeAmplitudes {
    double phi_a = 0.0;
    double phi_b = 0.0;
    double phi_c = 0.0;
};

inline constexpr double singular_cos_tolerance = 1e-9;

// Second-order expansion of the junction phase in the stray ratio.
[[nodiscard]] inline double junction_phase(const JRMParams& jrm, FluxBias flux) {
    const double a = jrm.stray_ratio();
    const double pe = flux.phi_e;
    return pe / 4.0 - a * std::sin(pe / 4.0) + 0.5 * a * a * std::sin(pe / 2.0);
}

[[nodiscard]] inline double circulating_current(const JRMParams& jrm, FluxBias flux) {
    return jrm.critical_current * std::sin(junction_phase(jrm, flux));
}

// May be negative once the junction phase passes pi/2; callers decide.
[[nodiscard]] inline double junction_inductance(const JRMParams& jrm, FluxBias flux) {
    const double c = std::cos(junction_phase(jrm, flux));
    if (std::abs(c) < singular_cos_tolerance)
        throw singular_flux_error("junction inductance diverges at phi_e = " + std::to_string(flux.phi_e));
    return jrm.josephson_inductance0() / c;
}

[[nodiscard]] inline double jrm_inductance(const JRMParams& jrm, FluxBias flux) {
    const double branch = junction_inductance(jrm, flux) + jrm.stray_inductance;
    const double two_in = 2.0 * jrm.shunt_inductance;
    const double den = branch + two_in;
    if (std::abs(den) < 1e-9 * (std::abs(branch) + two_in))
        throw singular_flux_error("ring inductance diverges at phi_e = " + std::to_string(flux.phi_e));
    return two_in * branch / den;
}

[[nodiscard]] inline double participation_ratio(const JRMParams& jrm, FluxBias flux) {
    const double l = jrm_inductance(jrm, flux);
    return l / (l + 2.0 * jrm.outer_inductance);
}

enum class RingModel { full, half };

// Amplitude of the pump-driven mutual inductance between the two modes. The
// virtual-ground half circuit of the coupled design sees half the junction
// inductance.
[[nodiscard]] inline double mutual_modulation(const JRMParams& jrm, FluxBias flux, double pump_current,
                                              RingModel ring = RingModel::full) {
    if (pump_current < 0.0) throw domain_error("pump current amplitude must be nonnegative");
    double lj = junction_inductance(jrm, flux);
    if (ring == RingModel::half) lj *= 0.5;
    const double i0 = jrm.critical_current;
    return 0.5 * lj * circulating_current(jrm, flux) / (i0 * i0) * pump_current;
}

[[nodiscard]] inline double coupling_strength_g(const JRMParams& jrm, FluxBias flux) {
    return std::sin(flux.phi_e / 4.0) / (2.0 * jrm.dilution());
}

[[nodiscard]] inline double josephson_energy(const JRMParams& jrm) {
    return PhysicalConstants::reduced_flux_quantum * jrm.critical_current;
}

[[nodiscard]] inline double shunt_energy(const JRMParams& jrm) {
    const double p0 = PhysicalConstants::reduced_flux_quantum;
    return p0 * p0 / jrm.shunt_inductance;
}

[[nodiscard]] inline double jrm_energy(double ej, double el, const ModeAmplitudes& m, FluxBias flux) {
    const double q = flux.phi_e / 4.0;
    const double ha = m.phi_a / 2.0, hb = m.phi_b / 2.0, hc = m.phi_c / 2.0;
    return -4.0 * ej * std::cos(ha) * std::cos(hb) * std::cos(hc) * std::cos(q)
           - 4.0 * ej * std::sin(ha) * std::sin(hb) * std::sin(hc) * std::sin(q)
           + el / 4.0 * (m.phi_a * m.phi_a + m.phi_b * m.phi_b + m.phi_c * m.phi_c / 2.0);
}

// Low-order coefficients of the energy around the ground state:
// E ~ trilinear*a*b*c + quadratic_ab*(a^2+b^2) + quadratic_c*c^2.
struct EnergyExpansion {
    double trilinear = 0.0;
    double quadratic_ab = 0.0;
    double quadratic_c = 0.0;
};

[[nodiscard]] inline EnergyExpansion energy_expansion(double ej, double el, FluxBias flux) {
    const double q = flux.phi_e / 4.0;
    return {-0.5 * ej * std::sin(q), el / 4.0 + 0.5 * ej * std::cos(q), el / 8.0 + 0.5 * ej * std::cos(q)};
}

} // namespace jmix
