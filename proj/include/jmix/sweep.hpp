#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "jmix/errors.hpp"
#include "jmix/jrm.hpp"
#include "jmix/twoport.hpp"

namespace jmix {

struct PumpCurrent {
    double amps = 0.0;
};
struct PumpAlpha {
    double value = 0.0;
};
struct PumpRho {
    double value = 0.0;
};
using PumpStrength = std::variant<PumpCurrent, PumpAlpha, PumpRho>;

struct WorkingPoint {
    FluxBias flux;
    double pump_frequency = 0.0; // Hz
    PumpStrength strength = PumpAlpha{0.0};
    double pump_phase = 0.0;

    void validate() const {
        if (!(pump_frequency > 0.0) || !std::isfinite(pump_frequency))
            throw domain_error("pump frequency must be positive");
        if (!std::isfinite(flux.phi_e)) throw domain_error("flux must be finite");
        std::visit(
            [](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                double v = 0;
                if constexpr (std::is_same_v<T, PumpCurrent>) v = s.amps;
                else v = s.value;
                if (!(v >= 0.0) || !std::isfinite(v)) throw domain_error("pump strength must be nonnegative");
                if constexpr (std::is_same_v<T, PumpAlpha>)
                    if (v >= 1.0) throw domain_error("alpha must stay below 1 (dressed inductance would vanish)");
            },
            strength);
    }
};

inline const std::vector<std::string>& scattering_labels() {
    static const std::vector<std::string> labels{"s_aa", "s_ab", "s_ba", "s_bb"};
    return labels;
}

inline constexpr double db_floor = -200.0;

[[nodiscard]] inline double power_db(cplx s) {
    const double m = std::abs(s);
    if (!(m > 0.0)) return db_floor;
    return std::max(db_floor, 20.0 * std::log10(m));
}

// Frequency grid plus labelled complex traces. `freq` is the signal (port a)
// frequency; `idler_freq` records the mode-b frequency of each point.
struct SweepResult {
    std::vector<double> freq;
    std::vector<double> idler_freq;
    std::vector<std::string> labels;
    std::vector<std::vector<cplx>> traces;
    std::vector<std::uint8_t> singular;
    std::map<std::string, double> working_point;
    std::map<std::string, double> metrics;

    [[nodiscard]] std::size_t size() const { return freq.size(); }

    [[nodiscard]] std::size_t label_index(const std::string& label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw domain_error("sweep has no trace labelled " + label);
        return static_cast<std::size_t>(it - labels.begin());
    }
    [[nodiscard]] const std::vector<cplx>& trace(const std::string& label) const { return traces[label_index(label)]; }

    [[nodiscard]] std::vector<double> trace_db(const std::string& label) const {
        const auto& t = trace(label);
        std::vector<double> out(t.size());
        std::transform(t.begin(), t.end(), out.begin(), power_db);
        return out;
    }

    [[nodiscard]] std::size_t singular_count() const {
        return static_cast<std::size_t>(std::count(singular.begin(), singular.end(), std::uint8_t{1}));
    }

    void validate() const {
        if (traces.size() != labels.size()) throw schema_error("trace count differs from label count");
        for (const auto& t : traces)
            if (t.size() != freq.size()) throw schema_error("trace length differs from grid length");
        if (!singular.empty() && singular.size() != freq.size()) throw schema_error("flag length differs from grid");
        if (!idler_freq.empty() && idler_freq.size() != freq.size()) throw schema_error("idler grid length differs");
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw schema_error("duplicate labels");
    }

    static SweepResult with_scattering_labels(const std::vector<double>& grid) {
        SweepResult r;
        r.freq = grid;
        r.idler_freq.assign(grid.size(), 0.0);
        r.labels = scattering_labels();
        r.traces.assign(4, std::vector<cplx>(grid.size()));
        r.singular.assign(grid.size(), 0);
        return r;
    }

    void set_point(std::size_t i, const ScatteringPair& s) {
        traces[0][i] = s.s11;
        traces[1][i] = s.s12;
        traces[2][i] = s.s21;
        traces[3][i] = s.s22;
    }
};

// Reflection phase over a flux x frequency grid, row-major by flux.
struct PhaseMap {
    std::vector<double> flux_phi0;
    std::vector<double> freq;
    std::vector<double> phase;

    [[nodiscard]] double at(std::size_t flux_index, std::size_t freq_index) const {
        return phase[flux_index * freq.size() + freq_index];
    }
    [[nodiscard]] std::vector<double> column(std::size_t flux_index) const {
        auto first = phase.begin() + static_cast<std::ptrdiff_t>(flux_index * freq.size());
        return {first, first + static_cast<std::ptrdiff_t>(freq.size())};
    }
};

inline void require_increasing(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) throw domain_error(std::string(what) + " is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw domain_error(std::string(what) + " has non-finite entries");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw domain_error(std::string(what) + " must be strictly increasing");
    }
}

[[nodiscard]] inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

} // namespace jmix
