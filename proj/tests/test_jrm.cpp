#include <gtest/gtest.h>

#include <random>

#include "jmix/devices.hpp"
#include "jmix/jrm.hpp"
#include "oracles.hpp"

using namespace jmix;

namespace {
const JRMParams resonant = devices::resonant_ring();
const JRMParams coupled = devices::coupled_ring();
FluxBias phase(double phi_e) { return {phi_e}; }
} // namespace

TEST(Constants, FluxQuantumRelations) {
    EXPECT_DOUBLE_EQ(PhysicalConstants::flux_quantum, two_pi * PhysicalConstants::reduced_flux_quantum);
    EXPECT_NEAR(PhysicalConstants::reduced_flux_quantum, oracle::phi0_reduced, 1e-30);
}

TEST(JunctionPhase, VanishesAtZeroFlux) { EXPECT_EQ(junction_phase(resonant, phase(0.0)), 0.0); }

TEST(JunctionPhase, BareRingQuarterDivision) {
    JRMParams bare = resonant;
    bare.stray_inductance = 1e-30;
    EXPECT_NEAR(junction_phase(bare, phase(two_pi)), std::numbers::pi / 2, 1e-12);
}

TEST(JunctionPhase, SeriesTracksExactRelationAtLargeStrayRatio) {
    const double a = resonant.stray_ratio();
    EXPECT_NEAR(a, 10.0 / 40.6, 2e-3);
    const double series = junction_phase(resonant, phase(two_pi));
    const double exact = oracle::exact_junction_phase(a, two_pi);
    EXPECT_NEAR(exact, 1.3315, 5e-4);
    EXPECT_NEAR(series, 1.3245, 5e-4);
    EXPECT_LT(std::abs(series - exact) / exact, 0.01);
}

TEST(JunctionPhase, SeriesErrorIsThirdOrder) {
    for (const auto& ring : {resonant, coupled}) {
        const double a = ring.stray_ratio();
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double pe = two_pi * i / 200.0;
            worst = std::max(worst, std::abs(junction_phase(ring, phase(pe)) - oracle::exact_junction_phase(a, pe)));
        }
        EXPECT_LT(worst, 0.5 * a * a * a);
    }
}

TEST(JunctionPhase, OddInFlux) {
    for (double pe : {0.3, 1.7, 4.0, 9.1})
        EXPECT_DOUBLE_EQ(junction_phase(coupled, phase(-pe)), -junction_phase(coupled, phase(pe)));
}

TEST(CirculatingCurrent, Limits) {
    EXPECT_EQ(circulating_current(resonant, phase(0.0)), 0.0);
    JRMParams bare = resonant;
    bare.stray_inductance = 1e-30;
    EXPECT_NEAR(circulating_current(bare, phase(two_pi)), bare.critical_current, 1e-18);
}

TEST(CirculatingCurrent, MatchesHighPrecisionEvaluation) {
    const double pe = 1.2 * std::numbers::pi;
    const double expect = oracle::big_circulating_current(coupled.critical_current, coupled.stray_ratio(), pe);
    EXPECT_NEAR(circulating_current(coupled, phase(pe)), expect, 1e-14 * coupled.critical_current);
}

TEST(JunctionInductance, BareValues) {
    EXPECT_DOUBLE_EQ(junction_inductance(resonant, phase(0.0)), resonant.josephson_inductance0());
    EXPECT_NEAR(resonant.josephson_inductance0() * 1e12, 40.6, 0.5 * 0.406);
    EXPECT_NEAR(coupled.josephson_inductance0() * 1e12, 131.6, 0.2);
    EXPECT_NEAR(coupled.josephson_inductance0() * 1e12, 132.0, 0.005 * 132.0);
}

TEST(JunctionInductance, SingularAtDivergence) {
    JRMParams bare = resonant;
    bare.stray_inductance = 1e-40;
    EXPECT_THROW((void)junction_inductance(bare, phase(2.0 * std::numbers::pi)), singular_flux_error);
}

TEST(JunctionInductance, NegativeBeyondQuarterTurnIsReturned) {
    // Past the divergence the cosine is negative; the value is reported as is.
    const double l = junction_inductance(coupled, FluxBias::from_flux_quanta(1.2));
    EXPECT_LT(l, 0.0);
}

TEST(RingInductance, ZeroFluxArithmetic) {
    const double lin = 11.3, branch = resonant.josephson_inductance0() * 1e12 + 10.0;
    const double expect = 2.0 * lin * branch / (branch + 2.0 * lin);
    EXPECT_NEAR(jrm_inductance(resonant, phase(0.0)) * 1e12, expect, 1e-9);
    EXPECT_NEAR(expect, 15.62, 0.02);
}

TEST(RingInductance, Limits) {
    JRMParams weak = resonant;
    weak.critical_current = 1e-12; // huge junction inductance
    EXPECT_NEAR(jrm_inductance(weak, phase(0.0)), 2.0 * weak.shunt_inductance, 1e-6 * weak.shunt_inductance);
    JRMParams open = resonant;
    open.shunt_inductance = 1.0; // 1 H shunts: effectively open
    EXPECT_NEAR(jrm_inductance(open, phase(0.0)), open.josephson_inductance0() + open.stray_inductance, 1e-20);
}

TEST(ParticipationRatio, Values) {
    JRMParams no_outer = resonant;
    no_outer.outer_inductance = 1e-30;
    EXPECT_NEAR(participation_ratio(no_outer, phase(0.0)), 1.0, 1e-15);
    EXPECT_NEAR(participation_ratio(resonant, phase(0.0)), 0.224, 0.002);
    double prev = 1.0;
    for (double lo : {1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
        JRMParams r = resonant;
        r.outer_inductance = lo;
        const double p = participation_ratio(r, phase(0.0));
        EXPECT_LT(p, prev);
        EXPECT_GT(p, 0.0);
        prev = p;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(MutualModulation, ZeroCases) {
    EXPECT_EQ(mutual_modulation(resonant, phase(two_pi), 0.0), 0.0);
    EXPECT_EQ(mutual_modulation(resonant, phase(0.0), 1e-6), 0.0);
}

TEST(MutualModulation, MatchesHighPrecisionEvaluation) {
    const double got = mutual_modulation(resonant, phase(two_pi), 1e-6);
    const double expect = oracle::big_mutual_modulation(resonant.critical_current, resonant.stray_inductance, two_pi,
                                                        1e-6, false);
    EXPECT_NEAR(got, expect, 1e-12 * std::abs(expect));
    const double half = mutual_modulation(resonant, phase(two_pi), 1e-6, RingModel::half);
    EXPECT_NEAR(half, 0.5 * got, 1e-12 * std::abs(got));
}

TEST(MutualModulation, LinearInPumpCurrent) {
    const double one = mutual_modulation(coupled, phase(2.0), 0.3e-6);
    EXPECT_DOUBLE_EQ(mutual_modulation(coupled, phase(2.0), 0.6e-6), 2.0 * one);
    EXPECT_THROW((void)mutual_modulation(coupled, phase(2.0), -1.0), domain_error);
}

TEST(CouplingStrength, Values) {
    EXPECT_EQ(coupling_strength_g(resonant, phase(0.0)), 0.0);
    EXPECT_NEAR(resonant.dilution(), 3.59, 0.01);
    JRMParams r = resonant;
    r.shunt_inductance = r.josephson_inductance0() / 3.6;
    EXPECT_NEAR(coupling_strength_g(r, phase(two_pi)), 1.0 / 7.2, 1e-12);
}

TEST(RingEnergy, GroundValue) {
    const double ej = josephson_energy(resonant), el = shunt_energy(resonant);
    for (double pe : {0.0, 1.0, two_pi})
        EXPECT_NEAR(jrm_energy(ej, el, {}, phase(pe)), -4.0 * ej * std::cos(pe / 4.0), 1e-12 * ej);
}

TEST(RingEnergy, KerrNullingAtHalfTurn) {
    const double ej = josephson_energy(resonant), el = shunt_energy(resonant);
    // Along each mode axis the energy is purely quadratic at phi_e = 2 pi.
    for (int axis = 0; axis < 3; ++axis) {
        auto along = [&](double x) {
            ModeAmplitudes m;
            (axis == 0 ? m.phi_a : axis == 1 ? m.phi_b : m.phi_c) = x;
            return jrm_energy(ej, el, m, phase(two_pi));
        };
        EXPECT_NEAR(oracle::fourth(along, 0.05), 0.0, 1e-6 * el);
    }
    // Away from the nulling point the quartic term is present.
    auto off = [&](double x) { return jrm_energy(ej, el, {x, 0.0, 0.0}, phase(1.0)); };
    EXPECT_GT(std::abs(oracle::fourth(off, 0.05)), 1e-3 * ej);
}

TEST(RingEnergy, ExpansionMatchesFiniteDifferences) {
    const double ej = josephson_energy(coupled), el = shunt_energy(coupled);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-two_pi, two_pi);
    for (int t = 0; t < 20; ++t) {
        const double pe = u(rng);
        const auto c = energy_expansion(ej, el, phase(pe));
        auto e3 = [&](double a, double b, double cc) { return jrm_energy(ej, el, {a, b, cc}, phase(pe)); };
        // Richardson step removes the h^2 truncation term.
        const double tri = (4.0 * oracle::third_mixed(e3, 0.01) - oracle::third_mixed(e3, 0.02)) / 3.0;
        EXPECT_NEAR(tri, c.trilinear, 1e-6 * ej + 1e-6 * std::abs(c.trilinear));
        auto ea = [&](double x) { return jrm_energy(ej, el, {x, 0, 0}, phase(pe)); };
        auto ec = [&](double x) { return jrm_energy(ej, el, {0, 0, x}, phase(pe)); };
        EXPECT_NEAR(0.5 * oracle::second(ea, 1e-4), c.quadratic_ab, 1e-5 * (ej + el));
        EXPECT_NEAR(0.5 * oracle::second(ec, 1e-4), c.quadratic_c, 1e-5 * (ej + el));
    }
}

TEST(JRMParams, Validation) {
    JRMParams bad = resonant;
    bad.critical_current = 0.0;
    EXPECT_THROW(bad.validate(), domain_error);
    bad = resonant;
    bad.stray_inductance = 2.0 * bad.josephson_inductance0();
    EXPECT_THROW(bad.validate(), domain_error);
    EXPECT_NO_THROW(resonant.validate());
}
