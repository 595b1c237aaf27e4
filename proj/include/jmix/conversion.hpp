#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "jmix/constants.hpp"
#include "jmix/errors.hpp"
#include "jmix/parallel.hpp"
#include "jmix/sweep.hpp"

namespace jmix {

// Mode centres in Hz, linewidths in rad/s.
struct ModeLinewidths {
    double f_a = 0.0;
    double f_b = 0.0;
    double gamma_a = 0.0;
    double gamma_b = 0.0;

    void validate() const {
        if (!(f_a > 0.0) || !(f_b > 0.0) || !(gamma_a > 0.0) || !(gamma_b > 0.0))
            throw domain_error("mode frequencies and linewidths must be positive");
        if (f_a == f_b) throw domain_error("mode frequencies must differ");
    }
};

struct PumpSetting {
    double rho = 0.0;
    double phase = 0.0;
};

// Closed-form frequency converter; transmissions are photon-flux normalized so
// that |S_aa|^2 + |S_ba|^2 = 1 identically. The pump sits at f_b - f_a, so the
// signal and idler detunings coincide.
[[nodiscard]] inline ScatteringPair conversion_point(const ModeLinewidths& lw, const PumpSetting& pump, double f1) {
    const cplx i{0.0, 1.0};
    const double detuning = two_pi * (f1 - lw.f_a);
    const cplx xa = 1.0 - 2.0 * i * detuning / lw.gamma_a;
    const cplx xb = 1.0 - 2.0 * i * detuning / lw.gamma_b;
    const double r2 = pump.rho * pump.rho;
    const cplx den = xa * xb + r2;
    return {(std::conj(xa) * xb - r2) / den, 2.0 * i * pump.rho * std::polar(1.0, -pump.phase) / den,
            2.0 * i * pump.rho * std::polar(1.0, pump.phase) / den, (xa * std::conj(xb) - r2) / den, 50.0};
}

[[nodiscard]] inline SweepResult conversion_sparams(const ModeLinewidths& lw, const PumpSetting& pump,
                                                    const std::vector<double>& f1_grid) {
    lw.validate();
    if (pump.rho < 0.0) throw domain_error("rho must be nonnegative");
    require_increasing(f1_grid, "signal grid");
    auto out = SweepResult::with_scattering_labels(f1_grid);
    for (std::size_t k = 0; k < f1_grid.size(); ++k) {
        out.idler_freq[k] = f1_grid[k] + (lw.f_b - lw.f_a);
        out.set_point(k, conversion_point(lw, pump, f1_grid[k]));
    }
    out.working_point["rho"] = pump.rho;
    out.working_point["pump_phase_rad"] = pump.phase;
    out.working_point["pump_frequency_hz"] = lw.f_b - lw.f_a;
    return out;
}

struct ThresholdInterval {
    bool defined = false;
    double low = std::numeric_limits<double>::quiet_NaN();
    double high = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] double width() const { return defined ? high - low : std::numeric_limits<double>::quiet_NaN(); }
};

enum class IntervalRule { containing_extremum, hull };
enum class Side { below, above };

namespace detail {
inline double crossing(double f0, double v0, double f1, double v1, double level) {
    if (v1 == v0) return 0.5 * (f0 + f1);
    return f0 + (level - v0) * (f1 - f0) / (v1 - v0);
}
} // namespace detail

// Span where the dB curve stays on `side` of `level`. The containing-extremum
// rule walks outward from `anchor`; the hull rule spans the first to the last
// qualifying point. Undefined if the span runs into the grid edge or is empty.
[[nodiscard]] inline ThresholdInterval threshold_interval(const std::vector<double>& f, const std::vector<double>& db,
                                                          double level, Side side, std::size_t anchor,
                                                          IntervalRule rule = IntervalRule::containing_extremum) {
    const auto ok = [&](std::size_t k) { return side == Side::below ? db[k] <= level : db[k] >= level; };
    const std::size_t n = f.size();
    ThresholdInterval out;
    if (n < 2 || db.size() != n) return out;
    std::size_t lo = 0, hi = 0;
    if (rule == IntervalRule::containing_extremum) {
        if (anchor >= n || !ok(anchor)) return out;
        lo = hi = anchor;
        while (lo > 0 && ok(lo - 1)) --lo;
        while (hi + 1 < n && ok(hi + 1)) ++hi;
    } else {
        std::size_t k = 0;
        while (k < n && !ok(k)) ++k;
        if (k == n) return out;
        lo = k;
        hi = n - 1;
        while (!ok(hi)) --hi;
    }
    if (lo == 0 || hi == n - 1) return out;
    out.defined = true;
    out.low = detail::crossing(f[lo - 1], db[lo - 1], f[lo], db[lo], level);
    out.high = detail::crossing(f[hi], db[hi], f[hi + 1], db[hi + 1], level);
    return out;
}

struct BandwidthMetrics {
    double level_db = 3.0;
    ThresholdInterval reflection_below_off;  // metric 1
    ThresholdInterval transmission_near_max; // metric 2
    ThresholdInterval reflection_near_min;   // metric 3
    double max_transmission_db = db_floor;
    double min_reflection_db = db_floor;

    [[nodiscard]] bool all_defined() const {
        return reflection_below_off.defined && transmission_near_max.defined && reflection_near_min.defined;
    }
};

[[nodiscard]] inline BandwidthMetrics bandwidth_metrics(const SweepResult& sweep, double level_db,
                                                        const std::string& reflection = "s_aa",
                                                        const std::string& transmission = "s_ba",
                                                        IntervalRule rule = IntervalRule::containing_extremum) {
    if (!(level_db > 0.0)) throw domain_error("bandwidth level must be positive dB");
    const auto r = sweep.trace_db(reflection);
    const auto t = sweep.trace_db(transmission);
    const std::size_t rmin = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
    const std::size_t tmax = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
    BandwidthMetrics m;
    m.level_db = level_db;
    m.min_reflection_db = r[rmin];
    m.max_transmission_db = t[tmax];
    m.reflection_below_off = threshold_interval(sweep.freq, r, -level_db, Side::below, rmin, rule);
    m.transmission_near_max = threshold_interval(sweep.freq, t, t[tmax] - level_db, Side::above, tmax, rule);
    // A null at the output floor cannot be widened by a finite level.
    m.reflection_near_min = r[rmin] + level_db < 0.0
                                ? threshold_interval(sweep.freq, r, r[rmin] + level_db, Side::below, rmin, rule)
                                : ThresholdInterval{};
    return m;
}

// Gain span of a reflection amplifier: |S|^2 at or above `gain_db`.
[[nodiscard]] inline ThresholdInterval gain_interval(const SweepResult& sweep, double gain_db,
                                                     const std::string& label = "s_aa") {
    const auto g = sweep.trace_db(label);
    const std::size_t top = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    return threshold_interval(sweep.freq, g, gain_db, Side::above, top);
}

struct PumpSweepRow {
    double rho = 0.0;
    BandwidthMetrics metrics;
};

[[nodiscard]] inline std::vector<PumpSweepRow> pump_sweep(const ModeLinewidths& lw, const std::vector<double>& rho_grid,
                                                          const std::vector<double>& f1_grid, double level_db = 3.0) {
    for (std::size_t k = 0; k < rho_grid.size(); ++k) {
        if (rho_grid[k] < 0.0) throw domain_error("rho grid must be nonnegative");
        if (k > 0 && rho_grid[k] < rho_grid[k - 1]) throw domain_error("rho grid must be ascending");
    }
    std::vector<PumpSweepRow> rows(rho_grid.size());
    parallel_for(rho_grid.size(), [&](std::size_t k) {
        const auto s = conversion_sparams(lw, {rho_grid[k], 0.0}, f1_grid);
        rows[k] = {rho_grid[k], bandwidth_metrics(s, level_db)};
    });
    return rows;
}

} // namespace jmix
