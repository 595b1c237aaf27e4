#pragma once

#include <numbers>

namespace jmix {

// Exact SI values (2019 redefinition) plus the derived flux quanta.
struct PhysicalConstants {
    static constexpr double reduced_planck = 1.054571817e-34;  // J s
    static constexpr double electron_charge = 1.602176634e-19; // C
    static constexpr double boltzmann = 1.380649e-23;          // J/K
    static constexpr double light_speed = 299792458.0;         // m/s
    static constexpr double reduced_flux_quantum = reduced_planck / (2.0 * electron_charge);
    static constexpr double flux_quantum = 2.0 * std::numbers::pi * reduced_flux_quantum;
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace jmix
