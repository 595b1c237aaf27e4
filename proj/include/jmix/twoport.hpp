#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"

namespace jmix {

using cplx = std::complex<double>;
inline constexpr cplx j_unit{0.0, 1.0};

// Chain (ABCD) matrix: [V1; I1] = T [V2; I2].
struct TwoPortMatrix {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    [[nodiscard]] static TwoPortMatrix identity() { return {}; }
    [[nodiscard]] cplx det() const { return a * d - b * c; }

    [[nodiscard]] TwoPortMatrix conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }

    friend TwoPortMatrix operator*(const TwoPortMatrix& l, const TwoPortMatrix& r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }

    [[nodiscard]] TwoPortMatrix inverse() const {
        const cplx dt = det();
        if (dt == cplx{0.0}) throw singular_network_error("chain matrix is not invertible");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    [[nodiscard]] bool finite() const {
        auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        return ok(a) && ok(b) && ok(c) && ok(d);
    }
};

struct ScatteringPair {
    cplx s11, s12, s21, s22;
    double z0 = 50.0;
};

enum class MixingMode { amplification, conversion };

// Pumped-ring inverter. j1 and j2 are the magnitudes at the signal and idler
// frequencies; the pump phase is carried separately.
struct InverterStrength {
    double j1 = 0.0; // S
    double j2 = 0.0; // S
    double pump_phase = 0.0;

    [[nodiscard]] double geometric_mean() const { return std::sqrt(j1 * j2); }
};

namespace detail {
inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw domain_error(std::string(what) + " must be positive and finite");
}
} // namespace detail

[[nodiscard]] inline TwoPortMatrix abcd_series_impedance(cplx z) { return {1.0, z, 0.0, 1.0}; }
[[nodiscard]] inline TwoPortMatrix abcd_shunt_admittance(cplx y) { return {1.0, 0.0, y, 1.0}; }

[[nodiscard]] inline TwoPortMatrix abcd_series_capacitor(double capacitance, double freq) {
    detail::require_positive(capacitance, "capacitance");
    detail::require_positive(freq, "frequency");
    return abcd_series_impedance(1.0 / (j_unit * (two_pi * freq * capacitance)));
}

[[nodiscard]] inline cplx parallel_lc_admittance(double inductance, double capacitance, double freq) {
    const double w = two_pi * freq;
    return j_unit * (w * capacitance - 1.0 / (w * inductance));
}

[[nodiscard]] inline TwoPortMatrix abcd_parallel_lc(double inductance, double capacitance, double freq) {
    detail::require_positive(inductance, "inductance");
    detail::require_positive(capacitance, "capacitance");
    detail::require_positive(freq, "frequency");
    return abcd_shunt_admittance(parallel_lc_admittance(inductance, capacitance, freq));
}

// Convention (checked against the closed-form converter and the coupled-mode
// amplifier solve):
//   B = j e^{-j phi_p} / J1,   C = s j J2 e^{-j phi_p},   s = +1 conversion, -1 amplification.
// det = (J2/J1) e^{-2j phi_p}, which equals omega1/omega2 in conversion and
// produces the Manley-Rowe power asymmetry between S21 and S12.
[[nodiscard]] inline TwoPortMatrix abcd_jrm_inverter(const InverterStrength& s, MixingMode mode) {
    if (!(s.j1 > 0.0) || !(s.j2 > 0.0) || !std::isfinite(s.j1 * s.j2))
        throw domain_error("inverter strength must be nonzero; use the pump-off bypass instead");
    const cplx ph = std::polar(1.0, -s.pump_phase);
    const double sign = mode == MixingMode::conversion ? 1.0 : -1.0;
    return {0.0, j_unit * ph / s.j1, sign * j_unit * s.j2 * ph, 0.0};
}

[[nodiscard]] inline TwoPortMatrix cascade(std::span<const TwoPortMatrix> elements) {
    if (elements.empty()) throw domain_error("cascade needs at least one element");
    TwoPortMatrix t = elements.front();
    for (std::size_t i = 1; i < elements.size(); ++i) t = t * elements[i];
    return t;
}

[[nodiscard]] inline TwoPortMatrix cascade(std::initializer_list<TwoPortMatrix> elements) {
    return cascade(std::span<const TwoPortMatrix>(elements.begin(), elements.size()));
}

[[nodiscard]] inline ScatteringPair abcd_to_s(const TwoPortMatrix& t, double z0) {
    detail::require_positive(z0, "reference impedance");
    const cplx bz = t.b / z0, cz = t.c * z0;
    const cplx den = t.a + bz + cz + t.d;
    const double scale = std::abs(t.a) + std::abs(bz) + std::abs(cz) + std::abs(t.d);
    if (!(std::abs(den) > 1e-12 * scale) || !t.finite())
        throw singular_network_error("network denominator vanishes (instability threshold)");
    return {(t.a + bz - cz - t.d) / den, 2.0 * t.det() / den, 2.0 / den, (-t.a + bz - cz + t.d) / den, z0};
}

[[nodiscard]] inline TwoPortMatrix s_to_abcd(const ScatteringPair& s) {
    const double z0 = s.z0;
    if (s.s21 == cplx{0.0}) throw singular_network_error("S21 = 0 has no chain-matrix representation");
    const cplx one{1.0};
    const cplx den = 2.0 * s.s21;
    return {((one + s.s11) * (one - s.s22) + s.s12 * s.s21) / den,
            z0 * ((one + s.s11) * (one + s.s22) - s.s12 * s.s21) / den,
            ((one - s.s11) * (one - s.s22) - s.s12 * s.s21) / (z0 * den),
            ((one - s.s11) * (one + s.s22) + s.s12 * s.s21) / den};
}

} // namespace jmix
