#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>

#include "jmix/conversion.hpp"
#include "jmix/devices.hpp"
#include "jmix/resonant.hpp"

using namespace jmix;

namespace {
const FluxBias zero_flux{0.0};

struct Dressed {
    double fa, fb;
};
Dressed dressed(const ResonantJMParams& p, FluxBias flux, double alpha) {
    const double l = mode_inductance(p, flux) * (1.0 - alpha);
    return {1.0 / (two_pi * std::sqrt(l * p.ca)), 1.0 / (two_pi * std::sqrt(l * p.cb))};
}

// Alpha at which J1 J2 Z0^2 = 1 with both dressed modes on resonance. The
// signal-idler pair is the same for conversion and amplification there.
double unit_coupling_alpha(const ResonantJMParams& p, FluxBias flux) {
    auto g = [&](double a) {
        const auto d = dressed(p, flux, a);
        const double l = mode_inductance(p, flux);
        const auto inv = pumped_inverter(l, l, a, d.fa, d.fb, 0.0);
        return inv.j1 * inv.j2 * p.z0 * p.z0 - 1.0;
    };
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(g, 1e-6, 0.5, boost::math::tools::eps_tolerance<double>(52), it);
    return 0.5 * (r.first + r.second);
}
} // namespace

TEST(ModeGeometry, ZeroFluxFrequencies) {
    const auto p = devices::jm1();
    EXPECT_NEAR(mode_frequency(p, zero_flux, Mode::a) * 1e-9, 7.72, 0.01);
    EXPECT_NEAR(mode_frequency(p, zero_flux, Mode::b) * 1e-9, 10.78, 0.01);
}

TEST(ModeGeometry, FrequencyFallsTowardTheDivergence) {
    const auto p = devices::jm1();
    double prev = mode_frequency(p, zero_flux, Mode::a);
    for (int i = 1; i <= 40; ++i) {
        const double f = mode_frequency(p, FluxBias::from_flux_quanta(0.02 * i), Mode::a);
        EXPECT_LT(f, prev);
        prev = f;
    }
}

TEST(ModeGeometry, ImpedancesAndQuality) {
    const auto p = devices::jm1();
    EXPECT_NEAR(mode_impedance(p, zero_flux, Mode::a), 3.4, 0.02 * 3.4);
    EXPECT_NEAR(mode_impedance(p, zero_flux, Mode::b), 4.7, 0.02 * 4.7);
    EXPECT_NEAR(external_q(p, zero_flux, Mode::a), 14.8, 0.02 * 14.8);
    EXPECT_NEAR(external_q(p, zero_flux, Mode::b), 10.6, 0.02 * 10.6);
}

TEST(ModeGeometry, StabilityProduct) {
    const auto p = devices::jm1();
    EXPECT_NEAR(stability_product(p, zero_flux, 0.58), 53.0, 1.0);
    // With the participation ratio computed from the circuit it is much smaller.
    const double own = stability_product(p, zero_flux, participation_ratio(p.jrm, zero_flux));
    EXPECT_GT(own, 0.0);
    EXPECT_LT(own, 53.0);
}

TEST(LinearBandwidth, Values) {
    const auto p = devices::jm1();
    EXPECT_NEAR(linear_bandwidth(p, Mode::b) * 1e-9, 1.017, 0.002);
    EXPECT_NEAR(linear_bandwidth(p, Mode::a) * 1e-6, 522.0, 1.0);
    auto q = p;
    q.cb *= 2.0;
    EXPECT_NEAR(linear_bandwidth(q, Mode::b), 0.5 * linear_bandwidth(p, Mode::b), 1e-3);
}

TEST(GainBandwidth, Values) {
    EXPECT_NEAR(gain_bandwidth_check(400e6, 1e9, 100.0) * 1e-6, 57.0, 1.0);
    EXPECT_DOUBLE_EQ(gain_bandwidth_check(3e8, 3e8, 1.0), 3e8);
    EXPECT_DOUBLE_EQ(gain_bandwidth_check(3e8, 3e8, 25.0), 3e8 / 5.0);
    EXPECT_THROW((void)gain_bandwidth_check(0.0, 1.0, 1.0), domain_error);
}

TEST(PumpedNetwork, PumpOffIsTwoLosslessReflections) {
    const auto p = devices::jm2();
    const std::pair<MixingMode, double> pumps[] = {{MixingMode::conversion, 3e9}, {MixingMode::amplification, 18e9}};
    for (const auto& [mode, fp] : pumps)
        for (double f : {6e9, 7.5e9, 8e9}) {
            const auto s = pumped_response(p, {zero_flux, fp, PumpAlpha{0.0}, 0.0}, f, mode);
            EXPECT_NEAR(std::abs(s.s11), 1.0, 1e-14);
            EXPECT_NEAR(std::abs(s.s22), 1.0, 1e-14);
            EXPECT_EQ(s.s21, cplx{0.0});
            EXPECT_EQ(s.s12, cplx{0.0});
        }
    EXPECT_THROW((void)build_cascade(p, {zero_flux, 3e9, PumpAlpha{0.0}, 0.0}, 7e9, MixingMode::conversion),
                 domain_error);
}

TEST(PumpedNetwork, TransmissionGrowsAsSqrtAlpha) {
    const auto p = devices::jm2();
    const double f = 7.0e9;
    auto s21 = [&](double a) {
        return std::abs(pumped_response(p, {zero_flux, 3e9, PumpAlpha{a}, 0.0}, f, MixingMode::conversion).s21);
    };
    const double r = s21(4e-8) / s21(1e-8);
    EXPECT_NEAR(r, 2.0, 1e-3);
}

TEST(PumpedNetwork, FullConversionNullsReflection) {
    const auto p = devices::jm2();
    const double a = unit_coupling_alpha(p, zero_flux);
    const auto d = dressed(p, zero_flux, a);
    const WorkingPoint wp{zero_flux, d.fb - d.fa, PumpAlpha{a}, 0.0};
    const auto s = pumped_response(p, wp, d.fa, MixingMode::conversion);
    EXPECT_LT(std::abs(s.s11), 1e-9);
    EXPECT_NEAR(std::norm(s.s21) * d.fa / d.fb, 1.0, 1e-9);
}

TEST(PumpedNetwork, PhotonFluxIsConservedInConversion) {
    const auto p = devices::jm2();
    for (double a : {1e-4, 3e-3, 1e-2, 5e-2}) {
        const WorkingPoint wp{FluxBias::from_flux_quanta(0.3), 3.1e9, PumpAlpha{a}, 0.7};
        const auto sw = sparams(p, wp, linspace(5e9, 10e9, 301), MixingMode::conversion);
        for (std::size_t i = 0; i < sw.size(); ++i) {
            const double ratio = sw.freq[i] / sw.idler_freq[i];
            EXPECT_NEAR(std::norm(sw.traces[0][i]) + ratio * std::norm(sw.traces[2][i]), 1.0, 1e-6);
            EXPECT_NEAR(std::norm(sw.traces[3][i]) + std::norm(sw.traces[1][i]) / ratio, 1.0, 1e-6);
        }
    }
}

TEST(PumpedNetwork, AmplificationNeverAttenuates) {
    const auto p = devices::jm1();
    const auto d = dressed(p, zero_flux, 0.003);
    const WorkingPoint wp{zero_flux, d.fa + d.fb, PumpAlpha{0.003}, 0.0};
    const auto sw = sparams(p, wp, linspace(6e9, 9.5e9, 801), MixingMode::amplification);
    EXPECT_EQ(sw.singular_count(), 0u);
    for (const auto& s : sw.traces[0]) EXPECT_GE(std::norm(s), 1.0 - 1e-12);
}

TEST(PumpedNetwork, AmplifierThresholdIsFlagged) {
    const auto p = devices::jm1();
    const double a = unit_coupling_alpha(p, zero_flux);
    const auto d = dressed(p, zero_flux, a);
    const WorkingPoint wp{zero_flux, d.fa + d.fb, PumpAlpha{a}, 0.0};
    EXPECT_THROW((void)pumped_response(p, wp, d.fa, MixingMode::amplification), singular_network_error);
    // Just below threshold the reflection gain is huge.
    const WorkingPoint below{zero_flux, d.fa + d.fb, PumpAlpha{a * (1.0 - 1e-4)}, 0.0};
    const auto db = dressed(p, zero_flux, a * (1.0 - 1e-4));
    EXPECT_GT(power_db(pumped_response(p, below, db.fa, MixingMode::amplification).s11), 60.0);
    // A grid that lands on the pole flags that point and fills it with NaN.
    std::vector<double> grid{d.fa - 1e8, d.fa, d.fa + 1e8};
    const auto sw = sparams(p, wp, grid, MixingMode::amplification);
    EXPECT_EQ(sw.singular_count(), 1u);
    EXPECT_EQ(sw.singular[1], 1);
    EXPECT_TRUE(std::isnan(sw.traces[0][1].real()));
}

TEST(PumpedNetwork, RejectsUnphysicalWorkingPoints) {
    const auto p = devices::jm1();
    const auto grid = linspace(6e9, 8e9, 11);
    EXPECT_THROW((void)sparams(p, {zero_flux, 3e9, PumpAlpha{1.0}, 0.0}, grid, MixingMode::conversion), domain_error);
    EXPECT_THROW((void)sparams(p, {zero_flux, -1.0, PumpAlpha{0.1}, 0.0}, grid, MixingMode::conversion), domain_error);
    // Idler below zero in amplification.
    EXPECT_THROW((void)sparams(p, {zero_flux, 7e9, PumpAlpha{0.01}, 0.0}, grid, MixingMode::amplification),
                 domain_error);
    EXPECT_THROW((void)sparams(p, {zero_flux, 3e9, PumpAlpha{0.01}, 0.0}, {2e9, 1e9}, MixingMode::conversion),
                 domain_error);
}

TEST(PumpStrength, AlphaRhoRoundTrip) {
    const auto p = devices::jm2();
    const auto flux = FluxBias::from_flux_quanta(1.2);
    for (double rho : {0.0, 0.1, 0.5, 1.0, 1.3}) EXPECT_NEAR(rho_from_alpha(p, flux, alpha_from_rho(p, flux, rho)), rho, 1e-12);
    EXPECT_THROW((void)alpha_from_rho(p, flux, -0.1), domain_error);
}

TEST(PumpStrength, CurrentMapsThroughModulation) {
    const auto p = devices::jm1();
    const auto flux = FluxBias::from_flux_quanta(0.5);
    const WorkingPoint wp{flux, 3e9, PumpCurrent{1e-6}, 0.0};
    const double l = mode_inductance(p, flux);
    const double dm = mutual_modulation(p.jrm, flux, 1e-6);
    EXPECT_DOUBLE_EQ(resolve_alpha(p, wp), dm * dm / (4.0 * l * l));
}

TEST(PumpStrength, CalibrationRecoversUnitRhoAtFullConversion) {
    const auto p = devices::jm2();
    const double a = unit_coupling_alpha(p, zero_flux);
    const auto d = dressed(p, zero_flux, a);
    const WorkingPoint wp{zero_flux, d.fb - d.fa, PumpAlpha{a}, 0.0};
    EXPECT_NEAR(calibrate_rho(p, wp, d.fa, MixingMode::conversion), 1.0, 1e-9);
    // The closed-form estimate agrees with the exact calibration on resonance.
    EXPECT_NEAR(rho_from_alpha(p, zero_flux, a), 1.0, 1e-9);
}

TEST(PumpedNetwork, LowFluxAmplifierHasSinglePeakedGain) {
    // Working point 0.7 flux quanta, 17.5 GHz pump: a gain curve with one peak.
    const auto p = devices::jm1();
    const auto flux = FluxBias::from_flux_quanta(0.7);
    const auto grid = linspace(6.0e9, 9.5e9, 1401);
    bool found = false;
    for (double a = 0.0005; a < 0.02 && !found; a += 0.0005) {
        const auto sw = sparams(p, {flux, 17.5e9, PumpAlpha{a}, 0.0}, grid, MixingMode::amplification);
        if (sw.singular_count() > 0) break;
        const auto g = sw.trace_db("s_aa");
        const auto top = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
        if (g[top] < 15.0 || top == 0 || top + 1 == g.size()) continue;
        bool single = true;
        for (std::size_t i = 1; i <= top; ++i) single = single && g[i] >= g[i - 1] - 1e-12;
        for (std::size_t i = top + 1; i < g.size(); ++i) single = single && g[i] <= g[i - 1] + 1e-12;
        found = single;
    }
    EXPECT_TRUE(found);
}
