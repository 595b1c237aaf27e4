#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "jmix/coupled.hpp"
#include "jmix/errors.hpp"
#include "jmix/optimize.hpp"
#include "jmix/parallel.hpp"
#include "jmix/resonant.hpp"
#include "jmix/sweep.hpp"

namespace jmix {

// Resonance frequencies (Hz) per flux point for each port; a flux point may
// carry zero, one or several resonances per port.
struct ResonanceData {
    std::vector<double> flux_phi0;
    std::array<std::vector<std::vector<double>>, 2> ports;

    void validate() const {
        require_increasing(flux_phi0, "flux grid");
        for (const auto& p : ports)
            if (!p.empty() && p.size() != flux_phi0.size())
                throw schema_error("resonance lists must have one entry per flux point");
    }
    [[nodiscard]] std::size_t count() const {
        std::size_t n = 0;
        for (const auto& p : ports)
            for (const auto& col : p) n += col.size();
        return n;
    }
};

struct ExtractedResonances {
    std::vector<std::vector<double>> per_flux;
    std::vector<std::uint8_t> no_crossing;
};

[[nodiscard]] inline ExtractedResonances extract_resonances(const PhaseMap& map) {
    require_increasing(map.flux_phi0, "flux grid");
    require_increasing(map.freq, "frequency grid");
    if (map.phase.size() != map.flux_phi0.size() * map.freq.size())
        throw schema_error("phase map size does not match its grids");
    ExtractedResonances out;
    for (std::size_t r = 0; r < map.flux_phi0.size(); ++r) {
        auto found = zero_phase_crossings(map.freq, map.column(r));
        std::sort(found.begin(), found.end());
        out.no_crossing.push_back(found.empty() ? 1 : 0);
        out.per_flux.push_back(std::move(found));
    }
    return out;
}

// ---- named parameters -------------------------------------------------------

[[nodiscard]] inline double& parameter_ref(JRMParams& j, double& ca, double& cb, const std::string& name, bool& ok) {
    ok = true;
    if (name == "I0") return j.critical_current;
    if (name == "Ls") return j.stray_inductance;
    if (name == "Lin") return j.shunt_inductance;
    if (name == "Lout") return j.outer_inductance;
    if (name == "Ca") return ca;
    if (name == "Cb") return cb;
    ok = false;
    return ca;
}

[[nodiscard]] inline double& parameter_ref(ResonantJMParams& p, const std::string& name) {
    bool ok = false;
    double& v = parameter_ref(p.jrm, p.ca, p.cb, name, ok);
    if (!ok) throw domain_error("unknown resonant-model parameter '" + name + "'");
    return v;
}

[[nodiscard]] inline double& parameter_ref(Netlist& n, const std::string& name) {
    bool ok = false;
    double& v = parameter_ref(n.jrm, n.ca, n.cb, name, ok);
    if (ok) return v;
    // Arm elements: L2a, C3b, C12a, C34b, ...
    if (name.size() >= 3) {
        const char arm = name.back();
        const std::string body = name.substr(0, name.size() - 1);
        if (arm == 'a' || arm == 'b') {
            auto& net = n.arms[arm == 'a' ? 0 : 1];
            static const std::array<std::string, 3> ls{"L2", "L3", "L4"}, cs{"C2", "C3", "C4"}, cc{"C12", "C23", "C34"};
            for (std::size_t i = 0; i < 3; ++i) {
                if (body == ls[i]) return net.inductance[i];
                if (body == cs[i]) return net.capacitance[i];
                if (body == cc[i]) return net.coupling[i];
            }
        }
    }
    throw domain_error("unknown netlist parameter '" + name + "'");
}

// Everything the resonance data can constrain. I0 is excluded for the
// resonant model (an exact scale degeneracy with the inductances).
[[nodiscard]] inline std::vector<std::string> default_free_parameters(const ResonantJMParams&) {
    return {"Ls", "Lin", "Lout", "Ca", "Cb"};
}

[[nodiscard]] inline std::vector<std::string> default_free_parameters(const Netlist&) {
    std::vector<std::string> out{"Lin", "Lout", "Ca", "Cb"};
    for (const char* arm : {"a", "b"})
        for (const char* e : {"L2", "L3", "L4", "C2", "C3", "C4", "C12", "C23", "C34"}) out.push_back(std::string(e) + arm);
    return out;
}

// ---- forward models ---------------------------------------------------------

struct FitWindow {
    double low = 0.0;
    double high = 0.0;
};

struct ForwardSettings {
    ResonanceProbe probe;
    std::size_t coarse_points = 241;
    std::array<FitWindow, 2> windows{}; // coupled model only; zero means derive from data
};

// The closed-form mode frequency seeds a local search for the reflection
// phase zero under the same weak probe a measured flux map would use; the
// probe pulls the zero by up to ~0.15% near the top of the flux range.
[[nodiscard]] inline std::vector<double> model_resonances(const ResonantJMParams& p, double flux_phi0, Mode port,
                                                          const ForwardSettings& fs) {
    try {
        const auto flux = FluxBias::from_flux_quanta(flux_phi0);
        const double bare = mode_frequency(p, flux, port);
        if (fs.probe.alpha == 0.0) return {bare};
        auto phase_at = [&](double f) { return reflection_phase(p, flux, port, f, fs.probe); };
        for (double span : {0.005, 0.02}) {
            const double lo = bare * (1.0 - span), hi = bare * (1.0 + span);
            const double p_lo = phase_at(lo), p_hi = phase_at(hi);
            if (!detail::crosses_zero(p_lo, p_hi)) continue;
            std::uintmax_t iters = 60;
            const auto r = boost::math::tools::toms748_solve(phase_at, lo, hi, p_lo, p_hi,
                                                             boost::math::tools::eps_tolerance<double>(50), iters);
            const double root = 0.5 * (r.first + r.second);
            if (std::abs(phase_at(root)) < 1e-3) return {root};
        }
        return {bare};
    } catch (const error&) {
        return {};
    }
}

[[nodiscard]] inline std::vector<double> model_resonances(const Netlist& n, double flux_phi0, Mode port,
                                                          const ForwardSettings& fs) {
    const auto& w = fs.windows[port == Mode::a ? 0 : 1];
    try {
        return port_resonances(n, FluxBias::from_flux_quanta(flux_phi0), port, w.low, w.high, fs.coarse_points, fs.probe);
    } catch (const error&) {
        return {};
    }
}

// ---- fitting ----------------------------------------------------------------

enum class FitLoss { squared_hz, squared_relative };

struct FitConfig {
    std::vector<std::string> free;                                  // empty -> model default
    std::map<std::string, std::pair<double, double>> bounds;        // explicit bounds override the fraction
    double constraint_fraction = 0.10;
    std::vector<std::string> shared{"I0", "Ls", "Lin", "Lout"};     // tied across devices in joint fits
    FitLoss loss = FitLoss::squared_hz;
    SimplexOptions simplex{};
    ForwardSettings forward{};
    std::size_t min_flux_points = 5;
    // Finish the simplex with a least-squares trust-region step.
    bool polish = true;
    int polish_iterations = 100;
    // Basin hopping after the restarts: perturb the best point by up to
    // +/- hop_fraction (relative), polish again, keep improvements. Stops
    // at hop_stop_rms_hz or after hop_patience hops without improvement.
    int hops = 24;
    double hop_fraction = 0.02;
    int hop_patience = 10;
    int hop_simplex_evaluations = 40;
    double hop_stop_rms_hz = 1.0;

    void validate() const {
        if (hops < 0 || hop_patience < 1 || hop_simplex_evaluations < 1 || !(hop_fraction > 0.0 && hop_fraction < 1.0))
            throw domain_error("hop settings must be nonnegative counts and a fraction in (0, 1)");
        if (!(constraint_fraction > 0.0 && constraint_fraction < 1.0))
            throw infeasible_bounds_error("constraint fraction must lie in (0, 1)");
        for (const auto& [name, b] : bounds)
            if (!(b.first < b.second)) throw infeasible_bounds_error("empty bound interval for " + name);
    }
};

template <class Device>
struct FitResult {
    std::vector<Device> devices;
    std::vector<std::string> names; // fitted coordinates, "name" or "name#k" for per-device values
    std::vector<double> values;
    std::vector<double> lower, upper;
    double loss = 0.0;
    double initial_loss = 0.0;
    double rms_hz = 0.0;         // over all matched data resonances
    double initial_rms_hz = 0.0;
    std::size_t matched = 0;
    bool converged = false;
    int evaluations = 0;
    int best_restart = -1;
};

namespace detail {

template <class Device>
struct JointProblem {
    std::vector<Device> start;
    std::vector<ResonanceData> data;
    std::vector<ForwardSettings> forward;
    FitLoss loss;
    // coordinate -> list of (device index, parameter name)
    std::vector<std::vector<std::pair<std::size_t, std::string>>> targets;

    [[nodiscard]] std::vector<Device> apply(const std::vector<double>& x) const {
        auto devs = start;
        for (std::size_t c = 0; c < x.size(); ++c)
            for (const auto& [k, name] : targets[c]) parameter_ref(devs[k], name) = x[c];
        return devs;
    }

    [[nodiscard]] std::vector<double> residuals(const std::vector<Device>& devs) const {
        std::vector<double> out;
        for (std::size_t k = 0; k < devs.size(); ++k)
            for (std::size_t p = 0; p < 2; ++p)
                for (std::size_t r = 0; r < data[k].ports[p].size(); ++r) {
                    const auto& col = data[k].ports[p][r];
                    if (col.empty()) continue;
                    const auto model =
                        model_resonances(devs[k], data[k].flux_phi0[r], p == 0 ? Mode::a : Mode::b, forward[k]);
                    for (double f : col) {
                        double best = f;
                        for (double m : model)
                            if (std::abs(m - f) < std::abs(best)) best = m - f;
                        out.push_back(loss == FitLoss::squared_hz ? best : best / f);
                    }
                }
        return out;
    }

    // Sum of squared residuals between each data resonance and the closest
    // model resonance on the same port and flux point.
    [[nodiscard]] double evaluate(const std::vector<Device>& devs, double* sum_sq_hz = nullptr,
                                  std::size_t* matched = nullptr) const {
        struct Job {
            std::size_t dev, port, flux;
        };
        std::vector<Job> jobs;
        for (std::size_t k = 0; k < devs.size(); ++k)
            for (std::size_t p = 0; p < 2; ++p)
                for (std::size_t r = 0; r < data[k].ports[p].size(); ++r)
                    if (!data[k].ports[p][r].empty()) jobs.push_back({k, p, r});
        std::vector<double> part(jobs.size()), part_hz(jobs.size());
        auto run = [&](std::size_t j) {
            const auto& jb = jobs[j];
            const auto model = model_resonances(devs[jb.dev], data[jb.dev].flux_phi0[jb.flux],
                                                jb.port == 0 ? Mode::a : Mode::b, forward[jb.dev]);
            double s = 0.0, s_hz = 0.0;
            for (double f : data[jb.dev].ports[jb.port][jb.flux]) {
                double best = f; // no model resonance: residual equals the data value
                for (double m : model)
                    if (std::abs(m - f) < std::abs(best)) best = m - f;
                s_hz += best * best;
                s += loss == FitLoss::squared_hz ? best * best : (best / f) * (best / f);
            }
            part[j] = s;
            part_hz[j] = s_hz;
        };
        for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
        double total = 0.0, total_hz = 0.0;
        std::size_t n = 0;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            total += part[j];
            total_hz += part_hz[j];
            n += data[jobs[j].dev].ports[jobs[j].port][jobs[j].flux].size();
        }
        if (sum_sq_hz) *sum_sq_hz = total_hz;
        if (matched) *matched = n;
        return total;
    }
};

inline ForwardSettings settle_windows(ForwardSettings fs, const ResonanceData& d) {
    for (std::size_t p = 0; p < 2; ++p) {
        if (fs.windows[p].high > fs.windows[p].low) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& col : d.ports[p])
            for (double f : col) {
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
        if (hi > 0.0) fs.windows[p] = {lo * 0.85, hi * 1.15};
        else fs.windows[p] = {1e9, 2e9};
    }
    return fs;
}

} // namespace detail

// Joint least-squares fit of several devices. Names listed in config.shared
// are one coordinate for all devices; other free names get one coordinate per
// device. Bounds default to +/- constraint_fraction around the start values.
template <class Device>
[[nodiscard]] FitResult<Device> fit_flux_map_joint(const std::vector<Device>& start,
                                                   const std::vector<ResonanceData>& data, const FitConfig& config) {
    config.validate();
    if (start.empty() || start.size() != data.size()) throw domain_error("need one dataset per starting device");
    for (const auto& d : data) {
        d.validate();
        if (d.flux_phi0.size() < config.min_flux_points)
            throw domain_error("flux-map fits need at least " + std::to_string(config.min_flux_points) + " flux points");
        if (d.count() == 0) throw domain_error("dataset contains no resonances");
    }
    detail::JointProblem<Device> prob;
    prob.start = start;
    prob.data = data;
    prob.loss = config.loss;
    for (const auto& d : data) prob.forward.push_back(detail::settle_windows(config.forward, d));

    const auto free = config.free.empty() ? default_free_parameters(start.front()) : config.free;
    FitResult<Device> out;
    std::vector<double> x0;
    auto add_coordinate = [&](const std::string& label, const std::string& name, double v,
                              std::vector<std::pair<std::size_t, std::string>> tgt) {
        double lo = v * (1.0 - config.constraint_fraction), hi = v * (1.0 + config.constraint_fraction);
        if (auto it = config.bounds.find(name); it != config.bounds.end()) std::tie(lo, hi) = it->second;
        if (auto it = config.bounds.find(label); it != config.bounds.end()) std::tie(lo, hi) = it->second;
        if (!(lo < hi) || !(v >= lo && v <= hi))
            throw infeasible_bounds_error("start value of " + label + " lies outside its bounds");
        out.names.push_back(label);
        out.lower.push_back(lo);
        out.upper.push_back(hi);
        x0.push_back(v);
        prob.targets.push_back(std::move(tgt));
    };
    for (const auto& name : free) {
        const bool tied = start.size() == 1 ||
                          std::find(config.shared.begin(), config.shared.end(), name) != config.shared.end();
        if (tied) {
            std::vector<std::pair<std::size_t, std::string>> tgt;
            for (std::size_t k = 0; k < start.size(); ++k) tgt.emplace_back(k, name);
            auto dev0 = start.front();
            add_coordinate(name, name, parameter_ref(dev0, name), std::move(tgt));
        } else {
            for (std::size_t k = 0; k < start.size(); ++k) {
                auto dev = start[k];
                add_coordinate(name + "#" + std::to_string(k), name, parameter_ref(dev, name), {{k, name}});
            }
        }
    }
    // Shared names must agree between the starting devices.
    for (const auto& name : config.shared)
        for (std::size_t k = 1; k < start.size(); ++k) {
            auto d0 = start[0], dk = start[k];
            bool known = true;
            try {
                (void)parameter_ref(d0, name);
            } catch (const domain_error&) {
                known = false;
            }
            if (known && parameter_ref(d0, name) != parameter_ref(dk, name) &&
                std::find(free.begin(), free.end(), name) == free.end())
                throw domain_error("shared parameter " + name + " differs between the starting devices");
        }

    auto objective = [&](const std::vector<double>& x) { return prob.evaluate(prob.apply(x)); };
    double init_hz = 0.0;
    out.initial_loss = prob.evaluate(start, &init_hz, &out.matched);
    if (out.matched < x0.size())
        throw fit_degenerate_error("fewer resonances (" + std::to_string(out.matched) + ") than free coordinates (" +
                                   std::to_string(x0.size()) + ")");
    // Every restart end point is polished before the best is chosen: a far
    // restart can undercut restart 0 on the simplex value yet sit in a worse
    // basin than restart 0 reaches after the least-squares step.
    auto runs = minimize_bounded_runs(objective, x0, out.lower, out.upper, config.simplex);
    if (config.polish) {
        auto resid = [&](const std::vector<double>& x) { return prob.residuals(prob.apply(x)); };
        parallel_for(
            runs.size(),
            [&](std::size_t r) {
                const auto pol = polish_least_squares(resid, runs[r].x, out.lower, out.upper, config.polish_iterations);
                runs[r].evaluations += pol.evaluations;
                if (pol.value < runs[r].value) {
                    runs[r].x = pol.x;
                    runs[r].value = pol.value;
                    runs[r].converged = runs[r].converged || pol.converged;
                }
            },
            config.simplex.concurrent ? thread_count() : 1u);
    }
    auto res = select_best(runs, x0, out.initial_loss);
    if (config.polish && config.hops > 0) {
        auto resid = [&](const std::vector<double>& x) { return prob.residuals(prob.apply(x)); };
        auto rms_hz = [&](const std::vector<double>& x) {
            double hz = 0.0;
            std::size_t n = 0;
            (void)prob.evaluate(prob.apply(x), &hz, &n);
            return std::sqrt(hz / static_cast<double>(std::max<std::size_t>(1, n)));
        };
        std::mt19937_64 rng(config.simplex.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> jitter(-config.hop_fraction, config.hop_fraction);
        int idle = 0;
        for (int h = 0; h < config.hops && idle < config.hop_patience; ++h) {
            if (rms_hz(res.x) <= config.hop_stop_rms_hz) break;
            auto trial = res.x;
            for (std::size_t i = 0; i < trial.size(); ++i) {
                const double margin = 1e-9 * (out.upper[i] - out.lower[i]);
                trial[i] = std::clamp(trial[i] * (1.0 + jitter(rng)), out.lower[i] + margin, out.upper[i] - margin);
            }
            // A short simplex first: the least-squares step alone tends to
            // slide straight back into the basin it was kicked out of.
            SimplexOptions kick = config.simplex;
            kick.restarts = 1;
            kick.polish_rounds = 0;
            kick.max_evaluations = config.hop_simplex_evaluations;
            kick.concurrent = false;
            const auto walked = minimize_bounded(objective, trial, out.lower, out.upper, kick);
            const auto pol = polish_least_squares(resid, walked.x, out.lower, out.upper, config.polish_iterations);
            res.evaluations += walked.evaluations + pol.evaluations;
            if (pol.value < res.value) {
                res.x = pol.x;
                res.value = pol.value;
                res.converged = pol.converged;
                idle = 0;
            } else {
                ++idle;
            }
        }
    }
    out.values = res.x;
    out.devices = prob.apply(res.x);
    double hz = 0.0;
    out.loss = prob.evaluate(out.devices, &hz, &out.matched);
    out.rms_hz = std::sqrt(hz / static_cast<double>(std::max<std::size_t>(1, out.matched)));
    out.initial_rms_hz = std::sqrt(init_hz / static_cast<double>(std::max<std::size_t>(1, out.matched)));
    out.converged = res.converged;
    out.evaluations = res.evaluations;
    out.best_restart = res.best_restart;
    return out;
}

template <class Device>
[[nodiscard]] FitResult<Device> fit_flux_map(const Device& start, const ResonanceData& data, const FitConfig& config) {
    return fit_flux_map_joint(std::vector<Device>{start}, std::vector<ResonanceData>{data}, config);
}

// Synthetic resonance data from a forward model (used for round trips and by
// the CLI to turn a device into fit targets).
template <class Device>
[[nodiscard]] ResonanceData synthesize_resonance_data(const Device& device, const std::vector<double>& flux_phi0,
                                                      const ForwardSettings& fs) {
    ResonanceData d;
    d.flux_phi0 = flux_phi0;
    for (std::size_t p = 0; p < 2; ++p) {
        d.ports[p].resize(flux_phi0.size());
        parallel_for(flux_phi0.size(), [&](std::size_t r) {
            d.ports[p][r] = model_resonances(device, flux_phi0[r], p == 0 ? Mode::a : Mode::b, fs);
        });
    }
    return d;
}

} // namespace jmix
