#include <gtest/gtest.h>

#include "jmix/conversion.hpp"
#include "oracles.hpp"

using namespace jmix;

namespace {
// Converter with the two linewidths quoted for the pump-sweep figure.
const ModeLinewidths sweep_modes{7e9, 10e9, two_pi * 400e6, two_pi * 900e6};

std::vector<double> signal_grid(const ModeLinewidths& lw, std::size_t n = 8001) {
    return linspace(lw.f_a - 3e9, lw.f_a + 3e9, n);
}
} // namespace

TEST(ClosedFormConverter, UnitPumpOnResonance) {
    const auto s = conversion_point(sweep_modes, {1.0, 0.0}, sweep_modes.f_a);
    EXPECT_NEAR(std::abs(s.s11), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.s12), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.s21), 1.0, 1e-15);
}

TEST(ClosedFormConverter, NoPumpReflectsEverything) {
    for (double f : {6e9, 7e9, 7.3e9}) {
        const auto s = conversion_point(sweep_modes, {0.0, 0.0}, f);
        EXPECT_NEAR(std::abs(s.s11 - 1.0) * (f == 7e9 ? 1.0 : 0.0), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(s.s11), 1.0, 1e-15);
        EXPECT_NEAR(std::abs(s.s22), 1.0, 1e-15);
        EXPECT_EQ(s.s21, cplx{0.0});
        EXPECT_EQ(s.s12, cplx{0.0});
    }
}

TEST(ClosedFormConverter, UnitarityOverPumpDetuningGrid) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int k = 0; k < 100; ++k) {
            const double rho = 3.0 * i / 99.0;
            const double f = sweep_modes.f_a + (k - 49.5) / 49.5 * 2e9;
            const auto s = conversion_point(sweep_modes, {rho, 0.3}, f);
            worst = std::max(worst, std::abs(std::norm(s.s11) + std::norm(s.s21) - 1.0));
            worst = std::max(worst, std::abs(std::norm(s.s22) + std::norm(s.s12) - 1.0));
        }
    EXPECT_LT(worst, 1e-12);
}

TEST(ClosedFormConverter, MatchesCoupledModeSolve) {
    for (double rho : {0.2, 0.8, 1.5})
        for (double f : {6.5e9, 7e9, 7.2e9}) {
            const double d = two_pi * (f - sweep_modes.f_a);
            const auto o = oracle::coupled_mode_solve(sweep_modes.gamma_a, sweep_modes.gamma_b, rho, d, d, false);
            const auto s = conversion_point(sweep_modes, {rho, 0.0}, f);
            EXPECT_NEAR(std::abs(s.s11 - o.s_aa), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(s.s21) - std::abs(o.s_ba), 0.0, 1e-12);
        }
}

TEST(BandwidthMetrics, SymmetricTransmissionWidthMatchesRootFinder) {
    const ModeLinewidths lw{7e9, 10e9, two_pi * 500e6, two_pi * 500e6};
    for (double rho : {0.3, 0.7, 1.0}) {
        const auto sw = conversion_sparams(lw, {rho, 0.0}, linspace(5e9, 9e9, 40001));
        const auto m = bandwidth_metrics(sw, 3.0);
        auto trans_db = [&](double f) {
            const double d = two_pi * (f - lw.f_a);
            return oracle::db(oracle::coupled_mode_solve(lw.gamma_a, lw.gamma_b, rho, d, d, false).s_ba);
        };
        const double peak = trans_db(lw.f_a);
        const auto [lo, hi] = oracle::crossings_around(trans_db, lw.f_a, peak - 3.0, 2e9);
        ASSERT_TRUE(m.transmission_near_max.defined);
        EXPECT_NEAR(m.transmission_near_max.width(), hi - lo, 1e-4 * (hi - lo));
    }
}

TEST(BandwidthMetrics, PumpSweepShapes) {
    std::vector<double> rho;
    for (int i = 1; i <= 40; ++i) rho.push_back(i / 40.0);
    const auto rows = pump_sweep(sweep_modes, rho, signal_grid(sweep_modes), 3.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1].metrics;
        const auto& b = rows[i].metrics;
        if (a.reflection_below_off.defined && b.reflection_below_off.defined) {
            EXPECT_GE(b.reflection_below_off.width(), a.reflection_below_off.width() - 1e3);
        }
        ASSERT_TRUE(a.transmission_near_max.defined);
        EXPECT_GE(b.transmission_near_max.width(), a.transmission_near_max.width() - 1e3);
        if (a.reflection_near_min.defined && b.reflection_near_min.defined) {
            EXPECT_LT(b.reflection_near_min.width(), a.reflection_near_min.width());
        }
    }
    const auto& last = rows.back().metrics;
    EXPECT_NEAR(last.max_transmission_db, 0.0, 1e-9);
    EXPECT_NEAR(last.reflection_below_off.width(), 900e6, 0.15 * 900e6);
    EXPECT_NEAR(last.transmission_near_max.width(), 900e6, 0.15 * 900e6);
}

TEST(BandwidthMetrics, SmallPumpTransmissionLevel) {
    for (double rho : {1e-3, 1e-2}) {
        const auto rows = pump_sweep(sweep_modes, {rho}, signal_grid(sweep_modes, 4001), 3.0);
        EXPECT_NEAR(rows[0].metrics.max_transmission_db, 20.0 * std::log10(2.0 * rho), 1e-3);
    }
}

TEST(BandwidthMetrics, FullConversionNullHitsTheFloor) {
    // An odd grid puts a point exactly on the mode centre.
    const auto rows = pump_sweep(sweep_modes, {1.0}, signal_grid(sweep_modes, 6001), 3.0);
    EXPECT_EQ(rows[0].metrics.min_reflection_db, db_floor);
    EXPECT_NEAR(rows[0].metrics.max_transmission_db, 0.0, 1e-12);
}

TEST(ThresholdInterval, EdgesAndRules) {
    const std::vector<double> f{0, 1, 2, 3, 4, 5, 6};
    const std::vector<double> two_dips{0, -5, 0, 0, -6, -6, 0};
    const auto c = threshold_interval(f, two_dips, -3.0, Side::below, 4);
    ASSERT_TRUE(c.defined);
    EXPECT_NEAR(c.low, 3.5, 1e-12);
    EXPECT_NEAR(c.high, 5.5, 1e-12);
    const auto h = threshold_interval(f, two_dips, -3.0, Side::below, 4, IntervalRule::hull);
    ASSERT_TRUE(h.defined);
    EXPECT_NEAR(h.low, 0.6, 1e-12);
    EXPECT_NEAR(h.high, 5.5, 1e-12);
    // A span that reaches the edge of the grid is undefined.
    const std::vector<double> open{-6, -6, 0, 0, 0, 0, 0};
    EXPECT_FALSE(threshold_interval(f, open, -3.0, Side::below, 0).defined);
    // Anchor outside the qualifying set.
    EXPECT_FALSE(threshold_interval(f, two_dips, -3.0, Side::below, 2).defined);
}

TEST(ThresholdInterval, UndefinedMetricsAreReported) {
    // With no pump the reflection never leaves 0 dB.
    const auto sw = conversion_sparams(sweep_modes, {0.0, 0.0}, signal_grid(sweep_modes, 1001));
    const auto m = bandwidth_metrics(sw, 3.0);
    EXPECT_FALSE(m.reflection_below_off.defined);
    EXPECT_FALSE(m.reflection_near_min.defined);
    EXPECT_FALSE(m.all_defined());
    EXPECT_THROW((void)bandwidth_metrics(sw, 0.0), domain_error);
}

TEST(GainInterval, Lorentzian) {
    SweepResult sw = SweepResult::with_scattering_labels(linspace(-10, 10, 20001));
    for (std::size_t i = 0; i < sw.size(); ++i) {
        const double x = sw.freq[i];
        sw.traces[0][i] = std::sqrt(100.0 / (1.0 + x * x)); // 20 dB peak, unit half width
    }
    const auto g = gain_interval(sw, 17.0);
    ASSERT_TRUE(g.defined);
    const double half = std::sqrt(100.0 / std::pow(10.0, 1.7) - 1.0);
    EXPECT_NEAR(g.width(), 2.0 * half, 1e-4);
}

TEST(ModeLinewidths, Validation) {
    EXPECT_THROW((ModeLinewidths{7e9, 7e9, 1.0, 1.0}.validate()), domain_error);
    EXPECT_THROW((ModeLinewidths{7e9, 8e9, 0.0, 1.0}.validate()), domain_error);
    EXPECT_THROW((void)conversion_sparams(sweep_modes, {-1.0, 0.0}, {7e9}), domain_error);
}
