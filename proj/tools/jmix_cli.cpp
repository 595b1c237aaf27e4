#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "jmix/jmix.hpp"

namespace {

using namespace jmix;
using io::json;

enum ExitCode : int { ok = 0, invalid = 1, infeasible = 2, singular = 3, undefined_metric = 4 };

// Missing --out means stdout; files go through the atomic writer.
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        io::atomic_write(path, content);
    }
}

MixingMode parse_mode(const std::string& s) {
    if (s == "amplification") return MixingMode::amplification;
    if (s == "conversion") return MixingMode::conversion;
    throw schema_error("--mode must be 'amplification' or 'conversion'");
}

Mode parse_port(const std::string& s) {
    if (s == "a") return Mode::a;
    if (s == "b") return Mode::b;
    throw schema_error("--port must be 'a' or 'b'");
}

std::string si_display(double v, const char* unit) {
    // Inductances in pH/nH, capacitances in pF, currents in uA.
    const std::string u(unit);
    if (u == "H") return v >= 1e-9 ? fmt::format("{:.4g} nH", v * 1e9) : fmt::format("{:.4g} pH", v * 1e12);
    if (u == "F") return fmt::format("{:.4g} pF", v * 1e12);
    if (u == "A") return fmt::format("{:.4g} uA", v * 1e6);
    return fmt::format("{:.6g} {}", v, u);
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string config, out;
    std::vector<double> prototype;
};

int run_synth(const SynthArgs& a) {
    auto cfg = io::load_device(a.config);
    if (cfg.kind != io::DeviceKind::coupled || !cfg.synthesis)
        throw schema_error("synth needs a coupled device with a 'synthesis' block");
    if (!a.prototype.empty()) {
        if (a.prototype.size() != 6) throw schema_error("--prototype takes six coefficients g0..g5");
        std::copy(a.prototype.begin(), a.prototype.end(), cfg.synthesis->prototype.g.begin());
        cfg.synthesis->prototype.validate();
    }
    const auto result = synthesize(cfg.synthesis_spec(), cfg.synthesis->prototype);
    auto netlist = result.netlist;
    netlist.name = cfg.name;
    auto out = io::DeviceConfig::from(netlist);

    fmt::print("device {}  C_a = {}  C_b = {}\n", cfg.name.empty() ? "(unnamed)" : cfg.name, si_display(cfg.ca, "F"),
               si_display(cfg.cb, "F"));
    fmt::print("{:<6} {:<10} {:>14}\n", "block", "element", "value");
    fmt::print("{:<6} {:<10} {:>14}\n", "ring", "I0", si_display(cfg.jrm.critical_current, "A"));
    fmt::print("{:<6} {:<10} {:>14}\n", "ring", "Ls", si_display(cfg.jrm.stray_inductance, "H"));
    fmt::print("{:<6} {:<10} {:>14}\n", "ring", "Lin", si_display(cfg.jrm.shunt_inductance, "H"));
    fmt::print("{:<6} {:<10} {:>14}\n", "ring", "Lout", si_display(cfg.jrm.outer_inductance, "H"));
    for (int k = 0; k < 2; ++k) {
        const char* tag = k == 0 ? "a" : "b";
        const auto& arm = netlist.arms[static_cast<std::size_t>(k)];
        for (int i = 0; i < 3; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            fmt::print("{:<6} {:<10} {:>14}\n", tag, fmt::format("L{}{}", i + 2, tag), si_display(arm.inductance[idx], "H"));
            fmt::print("{:<6} {:<10} {:>14}\n", tag, fmt::format("C{}{}", i + 2, tag), si_display(arm.capacitance[idx], "F"));
            fmt::print("{:<6} {:<10} {:>14}\n", tag, fmt::format("C{}{}{}", i + 1, i + 2, tag),
                       si_display(arm.coupling[idx], "F"));
        }
        fmt::print("# mode {}: centre {:.6g} GHz, fractional bandwidth {:.4g}\n", tag,
                   result.design[static_cast<std::size_t>(k)].frequency * 1e-9,
                   result.design[static_cast<std::size_t>(k)].fractional_bandwidth);
    }
    emit(a.out, io::dump(io::to_json(out)));
    return ok;
}

// ---- working point shared by sparams and ripple -------------------------------

struct PointArgs {
    double flux = 0.0;
    double pump_freq = 0.0;
    std::optional<double> alpha, current, rho;
    double phase = 0.0;
    std::string mode = "conversion";
    double fmin = 0.0, fmax = 0.0;
    std::size_t points = 401;
};

void add_point_options(CLI::App* sub, PointArgs& p, bool require_grid) {
    sub->add_option("--flux", p.flux, "external flux in units of the flux quantum")->required();
    sub->add_option("--pump-freq", p.pump_freq, "pump frequency in Hz")->required();
    auto* a = sub->add_option("--pump-alpha", p.alpha, "pump strength as the dimensionless dressing alpha");
    auto* c = sub->add_option("--pump-current", p.current, "pump current amplitude in A");
    auto* r = sub->add_option("--pump-rho", p.rho, "pump strength as the closed-form rho (resonant devices)");
    a->excludes(c)->excludes(r);
    c->excludes(r);
    sub->add_option("--pump-phase", p.phase, "pump phase in rad");
    sub->add_option("--mode", p.mode, "amplification or conversion")->check(CLI::IsMember({"amplification", "conversion"}));
    auto* lo = sub->add_option("--fmin", p.fmin, "lowest signal frequency in Hz");
    auto* hi = sub->add_option("--fmax", p.fmax, "highest signal frequency in Hz");
    if (require_grid) {
        lo->required();
        hi->required();
    }
    sub->add_option("--points", p.points, "number of grid points")->check(CLI::Range(2, 10000000));
}

WorkingPoint working_point(const PointArgs& p) {
    WorkingPoint wp;
    wp.flux = FluxBias::from_flux_quanta(p.flux);
    wp.pump_frequency = p.pump_freq;
    wp.pump_phase = p.phase;
    if (p.current) wp.strength = PumpCurrent{*p.current};
    else if (p.rho) wp.strength = PumpRho{*p.rho};
    else wp.strength = PumpAlpha{p.alpha.value_or(0.0)};
    wp.validate();
    return wp;
}

std::vector<double> signal_grid(const PointArgs& p) {
    if (!(p.fmin > 0.0) || !(p.fmax > p.fmin)) throw schema_error("need 0 < --fmin < --fmax");
    return linspace(p.fmin, p.fmax, p.points);
}

SweepResult device_sweep(const io::DeviceConfig& dev, const WorkingPoint& wp, const std::vector<double>& grid,
                         MixingMode mode) {
    if (dev.kind == io::DeviceKind::resonant) return sparams(dev.resonant(), wp, grid, mode);
    return coupled_sparams(dev.netlist(), wp, grid, mode);
}

// ---- sparams ------------------------------------------------------------------

struct SparamsArgs {
    std::string device, out, format;
    PointArgs point;
};

int run_sparams(const SparamsArgs& a) {
    const auto dev = io::load_device(a.device);
    const auto wp = working_point(a.point);
    const auto sweep = device_sweep(dev, wp, signal_grid(a.point), parse_mode(a.point.mode));
    std::string format = a.format;
    if (format.empty()) format = a.out.size() > 5 && a.out.substr(a.out.size() - 5) == ".json" ? "json" : "csv";
    emit(a.out, format == "json" ? io::dump(io::sweep_json(sweep)) : io::sweep_csv(sweep));
    const std::size_t bad = sweep.singular_count();
    if (bad * 100 > sweep.size()) {
        fmt::print(stderr, "{} of {} points are singular\n", bad, sweep.size());
        return singular;
    }
    return ok;
}

// ---- fluxmap ------------------------------------------------------------------

struct FluxmapArgs {
    std::string device, out, port = "a", resonances_out;
    double flux_min = 0.0, flux_max = 1.0;
    std::size_t flux_points = 41;
    double fmin = 0.0, fmax = 0.0;
    std::size_t points = 401;
    double probe_freq = ResonanceProbe{}.pump_frequency, probe_alpha = ResonanceProbe{}.alpha;
};

int run_fluxmap(const FluxmapArgs& a) {
    const auto dev = io::load_device(a.device);
    if (!(a.fmin > 0.0) || !(a.fmax > a.fmin)) throw schema_error("need 0 < --fmin < --fmax");
    if (!(a.flux_max > a.flux_min)) throw schema_error("need --flux-min < --flux-max");
    const auto flux = linspace(a.flux_min, a.flux_max, a.flux_points);
    const auto freq = linspace(a.fmin, a.fmax, a.points);
    const ResonanceProbe probe{a.probe_freq, a.probe_alpha};
    const Mode port = parse_port(a.port);
    const auto map = dev.kind == io::DeviceKind::resonant ? resonance_map(dev.resonant(), flux, freq, port, probe)
                                                          : resonance_map(dev.netlist(), flux, freq, port, probe);
    emit(a.out, io::phase_map_csv(map));
    if (!a.resonances_out.empty()) {
        const auto ex = extract_resonances(map);
        ResonanceData d;
        d.flux_phi0 = flux;
        d.ports[port == Mode::a ? 0 : 1] = ex.per_flux;
        io::atomic_write(a.resonances_out, io::resonances_csv(d));
    }
    return ok;
}

// ---- bandwidth ------------------------------------------------------------------

struct BandwidthArgs {
    std::string sweep, out, reflection = "s_aa", transmission = "s_ba", rule = "contiguous", metric;
    double level = 3.0;
    // Closed-form pump sweep.
    std::optional<double> fa, fb, gamma_a, gamma_b;
    double rho_min = 0.0, rho_max = 1.0;
    std::size_t rho_points = 21;
    double span = 0.0;
    std::size_t points = 4001;
};

bool requested_metrics_defined(const BandwidthMetrics& m, const std::string& which) {
    const bool all = which == "all";
    return !((all || which == "1") && !m.reflection_below_off.defined) &&
           !((all || which == "2") && !m.transmission_near_max.defined) &&
           !((all || which == "3") && !m.reflection_near_min.defined);
}

int run_bandwidth(const BandwidthArgs& a) {
    const IntervalRule rule = a.rule == "hull" ? IntervalRule::hull : IntervalRule::containing_extremum;
    json report;
    report["schema_version"] = io::schema_version;
    if (!a.sweep.empty()) {
        const auto sweep = io::sweep_from_csv(io::read_file(a.sweep));
        const auto m = bandwidth_metrics(sweep, a.level, a.reflection, a.transmission, rule);
        report["report"] = "bandwidth";
        report["source"] = a.sweep;
        report["reflection_label"] = a.reflection;
        report["transmission_label"] = a.transmission;
        report["rule"] = a.rule;
        report["metrics"] = io::to_json(m);
        emit(a.out, io::dump(report));
        if (!requested_metrics_defined(m, a.metric.empty() ? "all" : a.metric)) {
            fmt::print(stderr, "requested bandwidth metric is undefined on this sweep\n");
            return undefined_metric;
        }
        return ok;
    }
    if (!a.fa || !a.fb || !a.gamma_a || !a.gamma_b)
        throw schema_error("bandwidth needs --sweep, or all of --fa --fb --gamma-a --gamma-b");
    const ModeLinewidths lw{*a.fa, *a.fb, two_pi * *a.gamma_a, two_pi * *a.gamma_b};
    lw.validate();
    if (!(a.rho_max >= a.rho_min) || a.rho_min < 0.0) throw schema_error("need 0 <= --rho-min <= --rho-max");
    const double span = a.span > 0.0 ? a.span : 4.0 * std::max(*a.gamma_a, *a.gamma_b);
    const auto f1 = linspace(lw.f_a - span, lw.f_a + span, a.points);
    const auto rows = pump_sweep(lw, linspace(a.rho_min, a.rho_max, a.rho_points), f1, a.level);
    report["report"] = "pump_sweep";
    report["mode_a_hz"] = lw.f_a;
    report["mode_b_hz"] = lw.f_b;
    report["linewidth_a_hz"] = *a.gamma_a;
    report["linewidth_b_hz"] = *a.gamma_b;
    report["level_db"] = a.level;
    json series = json::array();
    for (const auto& r : rows) {
        json row = io::to_json(r.metrics);
        row["rho"] = r.rho;
        row["rho_squared"] = r.rho * r.rho;
        series.push_back(row);
    }
    report["series"] = series;
    emit(a.out, io::dump(report));
    // Weak pumps legitimately leave metrics undefined, so a pump sweep only
    // checks when --metric is given.
    if (!a.metric.empty())
        for (const auto& r : rows)
            if (!requested_metrics_defined(r.metrics, a.metric)) {
                fmt::print(stderr, "requested bandwidth metric is undefined at rho = {}\n", r.rho);
                return undefined_metric;
            }
    return ok;
}

// ---- noise ----------------------------------------------------------------------

struct NoiseArgs {
    std::string data, out;
    double mode_freq = 0.0;
    double tn_min = 1.0, tn_max = 20.0, nadd_max = 5.0;
};

int run_noise(const NoiseArgs& a) {
    const auto samples = io::noise_from_csv(io::read_file(a.data));
    NoiseFitOptions opt;
    opt.chain_temperature_min = a.tn_min;
    opt.chain_temperature_max = a.tn_max;
    opt.added_photons_max = a.nadd_max;
    if (!(a.tn_min > 0.0 && a.tn_max > a.tn_min && a.nadd_max > 0.0)) throw schema_error("invalid fit box");
    const auto fit = fit_noise(samples, a.mode_freq, opt);
    emit(a.out, io::dump(io::noise_report(fit, a.mode_freq, samples.size())));
    return ok;
}

// ---- ripple ---------------------------------------------------------------------

struct RippleArgs {
    std::string setup, device, out, response_out;
    PointArgs point;
    bool with_device = false;
};

int run_ripple(const RippleArgs& a) {
    const RippleSetup setup = a.setup.empty() ? reference_ripple_setup()
                                              : io::ripple_from_json(json::parse(io::read_file(a.setup)));
    setup.validate();
    json report;
    report["schema_version"] = io::schema_version;
    report["report"] = "ripple";
    report["setup"] = io::to_json(setup);
    report["ripple_spacing_hz"] = ripple_spacing(setup);
    if (!a.device.empty()) {
        const auto dev = io::load_device(a.device);
        const auto wp = working_point(a.point);
        const auto grid = signal_grid(a.point);
        const MixingMode mode = parse_mode(a.point.mode);
        WorkingPoint off = wp;
        off.strength = PumpAlpha{0.0};
        const auto on_sweep = device_sweep(dev, wp, grid, mode);
        const auto off_sweep = device_sweep(dev, off, grid, mode);
        std::string csv = "freq_hz,device_db,normalized_db\n";
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const cplx on = on_sweep.trace("s_aa")[i], bare = off_sweep.trace("s_aa")[i];
            const double norm_db = 10.0 * std::log10(normalized_response(setup, on, bare, grid[i]));
            const double dev_db = power_db(on) - power_db(bare);
            lo = std::min(lo, norm_db - dev_db);
            hi = std::max(hi, norm_db - dev_db);
            csv += io::num(grid[i]) + "," + io::num(dev_db) + "," + io::num(norm_db) + "\n";
        }
        report["ripple_peak_to_peak_db"] = hi - lo;
        if (!a.response_out.empty()) io::atomic_write(a.response_out, csv);
    }
    emit(a.out, io::dump(report));
    return ok;
}

// ---- fit ------------------------------------------------------------------------

struct FitArgs {
    std::string device, resonances, map_a, map_b, config, out, fitted_out;
};

ResonanceData load_fit_data(const FitArgs& a) {
    if (!a.resonances.empty()) return io::resonances_from_csv(io::read_file(a.resonances));
    if (a.map_a.empty() && a.map_b.empty()) throw schema_error("fit needs --resonances or --map-a/--map-b");
    ResonanceData d;
    for (int p = 0; p < 2; ++p) {
        const std::string& path = p == 0 ? a.map_a : a.map_b;
        if (path.empty()) continue;
        const auto map = io::phase_map_from_csv(io::read_file(path));
        if (d.flux_phi0.empty()) d.flux_phi0 = map.flux_phi0;
        else if (d.flux_phi0 != map.flux_phi0) throw schema_error("port maps use different flux grids");
        d.ports[static_cast<std::size_t>(p)] = extract_resonances(map).per_flux;
    }
    return d;
}

int run_fit(const FitArgs& a) {
    const auto dev = io::load_device(a.device);
    const FitConfig config = a.config.empty() ? FitConfig{} : io::fit_config_from_json(json::parse(io::read_file(a.config)));
    const auto data = load_fit_data(a);
    json report;
    io::DeviceConfig fitted;
    if (dev.kind == io::DeviceKind::resonant) {
        const auto r = fit_flux_map(dev.resonant(), data, config);
        report = io::fit_report(r);
        fitted = io::DeviceConfig::from(r.devices.front(), dev.name);
    } else {
        auto start = dev.netlist();
        const auto r = fit_flux_map(start, data, config);
        report = io::fit_report(r);
        auto n = r.devices.front();
        n.provenance = Provenance::fitted;
        fitted = io::DeviceConfig::from(n);
    }
    report["start_device"] = dev.name;
    report["config"] = io::to_json(config);
    if (!a.fitted_out.empty()) io::atomic_write(a.fitted_out, io::dump(io::to_json(fitted)));
    emit(a.out, io::dump(report));
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Josephson ring mixer design, simulation and fitting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "jmix 1.0.0");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "synthesize a coupled-mode netlist from a design spec");
    s->add_option("--config", synth.config, "device JSON with a synthesis block")->required()->check(CLI::ExistingFile);
    s->add_option("--out", synth.out, "netlist JSON output")->required();
    s->add_option("--prototype", synth.prototype, "override prototype g0..g5")->delimiter(',');

    SparamsArgs sp;
    auto* p = app.add_subcommand("sparams", "scattering parameters of a device at one working point");
    p->add_option("--device", sp.device, "device JSON")->required()->check(CLI::ExistingFile);
    p->add_option("--out", sp.out, "output file (stdout if omitted)");
    p->add_option("--format", sp.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add_point_options(p, sp.point, true);

    FluxmapArgs fm;
    auto* m = app.add_subcommand("fluxmap", "reflection phase over flux and frequency");
    m->add_option("--device", fm.device, "device JSON")->required()->check(CLI::ExistingFile);
    m->add_option("--out", fm.out, "phase-map CSV output");
    m->add_option("--port", fm.port, "a or b")->check(CLI::IsMember({"a", "b"}));
    m->add_option("--flux-min", fm.flux_min, "lowest flux in flux quanta");
    m->add_option("--flux-max", fm.flux_max, "highest flux in flux quanta");
    m->add_option("--flux-points", fm.flux_points, "flux grid size")->check(CLI::Range(2, 100000));
    m->add_option("--fmin", fm.fmin, "lowest port frequency in Hz")->required();
    m->add_option("--fmax", fm.fmax, "highest port frequency in Hz")->required();
    m->add_option("--points", fm.points, "frequency grid size")->check(CLI::Range(2, 10000000));
    m->add_option("--probe-pump-freq", fm.probe_freq, "pump frequency of the weak probe in Hz");
    m->add_option("--probe-alpha", fm.probe_alpha, "dressing of the weak probe");
    m->add_option("--resonances-out", fm.resonances_out, "also write extracted resonances as CSV");

    BandwidthArgs bw;
    auto* b = app.add_subcommand("bandwidth", "bandwidth metrics of a sweep or of a closed-form pump sweep");
    b->add_option("--sweep", bw.sweep, "sweep CSV to analyse")->check(CLI::ExistingFile);
    b->add_option("--out", bw.out, "report JSON (stdout if omitted)");
    b->add_option("--level", bw.level, "threshold in dB");
    b->add_option("--reflection", bw.reflection, "reflection trace label");
    b->add_option("--transmission", bw.transmission, "transmission trace label");
    b->add_option("--rule", bw.rule, "contiguous or hull")->check(CLI::IsMember({"contiguous", "hull"}));
    b->add_option("--metric", bw.metric, "metric that must be defined: 1, 2, 3 or all")
        ->check(CLI::IsMember({"1", "2", "3", "all"}));
    b->add_option("--fa", bw.fa, "mode a centre in Hz");
    b->add_option("--fb", bw.fb, "mode b centre in Hz");
    b->add_option("--gamma-a", bw.gamma_a, "mode a linewidth in Hz");
    b->add_option("--gamma-b", bw.gamma_b, "mode b linewidth in Hz");
    b->add_option("--rho-min", bw.rho_min, "smallest pump amplitude");
    b->add_option("--rho-max", bw.rho_max, "largest pump amplitude");
    b->add_option("--rho-points", bw.rho_points, "number of pump amplitudes")->check(CLI::Range(1, 100000));
    b->add_option("--span", bw.span, "half width of the signal grid in Hz");
    b->add_option("--points", bw.points, "signal grid size")->check(CLI::Range(3, 10000000));

    NoiseArgs nz;
    auto* n = app.add_subcommand("noise", "fit chain temperature and added noise to noise-rise data");
    n->add_option("--data", nz.data, "CSV with gain_db,noise_rise_db")->required()->check(CLI::ExistingFile);
    n->add_option("--mode-freq", nz.mode_freq, "signal mode frequency in Hz")->required();
    n->add_option("--out", nz.out, "report JSON (stdout if omitted)");
    n->add_option("--tn-min", nz.tn_min, "lower bound of the chain temperature in K");
    n->add_option("--tn-max", nz.tn_max, "upper bound of the chain temperature in K");
    n->add_option("--nadd-max", nz.nadd_max, "upper bound of the added photons");

    RippleArgs rp;
    auto* r = app.add_subcommand("ripple", "standing-wave ripple of the measurement setup");
    r->add_option("--setup", rp.setup, "setup JSON (built-in reference if omitted)")->check(CLI::ExistingFile);
    r->add_option("--out", rp.out, "report JSON (stdout if omitted)");
    r->add_option("--response-out", rp.response_out, "normalized response CSV");
    auto* rdev = r->add_option("--device", rp.device, "device whose pumped reflection is passed through the setup")
                     ->check(CLI::ExistingFile);
    rp.point.points = 2001;
    r->add_option("--flux", rp.point.flux, "external flux in flux quanta")->needs(rdev);
    r->add_option("--pump-freq", rp.point.pump_freq, "pump frequency in Hz")->needs(rdev);
    auto* ra = r->add_option("--pump-alpha", rp.point.alpha, "pump dressing alpha")->needs(rdev);
    auto* rc = r->add_option("--pump-current", rp.point.current, "pump current in A")->needs(rdev);
    auto* rr = r->add_option("--pump-rho", rp.point.rho, "closed-form pump amplitude")->needs(rdev);
    ra->excludes(rc)->excludes(rr);
    rc->excludes(rr);
    r->add_option("--pump-phase", rp.point.phase, "pump phase in rad");
    r->add_option("--mode", rp.point.mode, "amplification or conversion")
        ->check(CLI::IsMember({"amplification", "conversion"}));
    r->add_option("--fmin", rp.point.fmin, "lowest signal frequency in Hz");
    r->add_option("--fmax", rp.point.fmax, "highest signal frequency in Hz");
    r->add_option("--points", rp.point.points, "grid size")->check(CLI::Range(2, 10000000));

    FitArgs ft;
    auto* f = app.add_subcommand("fit", "fit circuit parameters to resonance flux maps");
    f->add_option("--device", ft.device, "starting device JSON")->required()->check(CLI::ExistingFile);
    f->add_option("--resonances", ft.resonances, "CSV with flux_phi0,port,freq_hz")->check(CLI::ExistingFile);
    f->add_option("--map-a", ft.map_a, "port-a phase map CSV")->check(CLI::ExistingFile);
    f->add_option("--map-b", ft.map_b, "port-b phase map CSV")->check(CLI::ExistingFile);
    f->add_option("--config", ft.config, "fit configuration JSON")->check(CLI::ExistingFile);
    f->add_option("--out", ft.out, "report JSON (stdout if omitted)");
    f->add_option("--fitted-out", ft.fitted_out, "fitted device JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid;
    }

    try {
        if (*s) return run_synth(synth);
        if (*p) return run_sparams(sp);
        if (*m) return run_fluxmap(fm);
        if (*b) return run_bandwidth(bw);
        if (*n) return run_noise(nz);
        if (*r) return run_ripple(rp);
        if (*f) return run_fit(ft);
    } catch (const synthesis_infeasible_error& e) {
        fmt::print(stderr, "synthesis infeasible at stage {}: {}\n", e.stage, e.what());
        return infeasible;
    } catch (const fit_degenerate_error& e) {
        fmt::print(stderr, "fit degenerate: {}\n", e.what());
        return undefined_metric;
    } catch (const metric_undefined_error& e) {
        fmt::print(stderr, "metric undefined: {}\n", e.what());
        return undefined_metric;
    } catch (const io::json::exception& e) {
        fmt::print(stderr, "invalid JSON: {}\n", e.what());
        return invalid;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return invalid;
    }
    return invalid;
}
