#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "jmix/conversion.hpp"
#include "jmix/coupled.hpp"
#include "jmix/errors.hpp"
#include "jmix/fitting.hpp"
#include "jmix/noise.hpp"
#include "jmix/resonant.hpp"
#include "jmix/ripple.hpp"
#include "jmix/sweep.hpp"

namespace jmix::io {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// ---- atomic file output -----------------------------------------------------

// Writes to a sibling temporary file and renames it over the target, so a
// failed run never leaves a truncated file behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open temporary file next to " + path.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw error("failed writing " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw error("cannot move output into place at " + path.string());
    }
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Shortest round-trip decimal form; locale independent.
[[nodiscard]] inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

// ---- JSON helpers -----------------------------------------------------------

namespace detail {
inline const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw schema_error(std::string("missing field '") + key + "'");
    return j.at(key);
}
inline double need_number(const json& j, const char* key) {
    const auto& v = need(j, key);
    if (!v.is_number()) throw schema_error(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}
inline std::string need_string(const json& j, const char* key) {
    const auto& v = need(j, key);
    if (!v.is_string()) throw schema_error(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}
template <std::size_t N>
std::array<double, N> need_array(const json& j, const char* key) {
    const auto& v = need(j, key);
    if (!v.is_array() || v.size() != N)
        throw schema_error(std::string("field '") + key + "' must be an array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!v[i].is_number()) throw schema_error(std::string("field '") + key + "' must hold numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}
inline void check_version(const json& j) {
    const auto& v = need(j, "schema_version");
    if (!v.is_number_integer() || v.get<int>() != schema_version)
        throw schema_error("unsupported schema_version (expected " + std::to_string(schema_version) + ")");
}
} // namespace detail

[[nodiscard]] inline json to_json(const JRMParams& p) {
    return {{"critical_current_a", p.critical_current},
            {"stray_inductance_h", p.stray_inductance},
            {"shunt_inductance_h", p.shunt_inductance},
            {"outer_inductance_h", p.outer_inductance}};
}

[[nodiscard]] inline JRMParams jrm_from_json(const json& j) {
    return {detail::need_number(j, "critical_current_a"), detail::need_number(j, "stray_inductance_h"),
            detail::need_number(j, "shunt_inductance_h"), detail::need_number(j, "outer_inductance_h")};
}

[[nodiscard]] inline json to_json(const ArmNetwork& a) {
    return {{"inductance_h", a.inductance}, {"capacitance_f", a.capacitance}, {"coupling_capacitance_f", a.coupling}};
}

[[nodiscard]] inline ArmNetwork arm_from_json(const json& j) {
    return {detail::need_array<3>(j, "inductance_h"), detail::need_array<3>(j, "capacitance_f"),
            detail::need_array<3>(j, "coupling_capacitance_f")};
}

[[nodiscard]] inline std::string to_string(DeviceRole r) { return r == DeviceRole::amplifier ? "amplifier" : "converter"; }
[[nodiscard]] inline DeviceRole role_from_string(const std::string& s) {
    if (s == "amplifier") return DeviceRole::amplifier;
    if (s == "converter") return DeviceRole::converter;
    throw schema_error("role must be 'amplifier' or 'converter'");
}

enum class DeviceKind { resonant, coupled };

struct SynthesisBlock {
    double design_flux_phi0 = 0.6;
    std::array<double, 2> negative_resistance{};
    std::array<double, 2> z2{50.0, 50.0};
    DeviceRole role = DeviceRole::amplifier;
    PrototypeCoefficients prototype;

    friend bool operator==(const SynthesisBlock&, const SynthesisBlock&) = default;
};

// Device description shared by every subcommand. A coupled device carries
// exactly one of a synthesis block or explicit arm networks.
struct DeviceConfig {
    DeviceKind kind = DeviceKind::resonant;
    std::string name;
    std::string provenance = "fitted";
    JRMParams jrm;
    double ca = 0.0, cb = 0.0, z0 = 50.0;
    std::optional<SynthesisBlock> synthesis;
    std::optional<std::array<ArmNetwork, 2>> arms;

    void validate() const {
        if (kind == DeviceKind::coupled && synthesis.has_value() == arms.has_value())
            throw schema_error("a coupled device needs exactly one of 'synthesis' or 'arms'");
        if (kind == DeviceKind::resonant && (synthesis || arms))
            throw schema_error("a resonant device takes neither 'synthesis' nor 'arms'");
        if (provenance != "fitted" && provenance != "synthesized")
            throw schema_error("provenance must be 'fitted' or 'synthesized'");
    }

    [[nodiscard]] ResonantJMParams resonant() const {
        if (kind != DeviceKind::resonant) throw schema_error("device is not a resonant mixer");
        return {jrm, ca, cb, z0};
    }

    [[nodiscard]] SynthesisSpec synthesis_spec() const {
        if (!synthesis) throw schema_error("device has no synthesis block");
        SynthesisSpec s;
        s.jrm = jrm;
        s.ca = ca;
        s.cb = cb;
        s.z0 = z0;
        s.design_flux = FluxBias::from_flux_quanta(synthesis->design_flux_phi0);
        s.negative_resistance = synthesis->negative_resistance;
        s.z2 = synthesis->z2;
        s.role = synthesis->role;
        return s;
    }

    // Explicit netlist, synthesizing on the fly when only a spec is present.
    [[nodiscard]] Netlist netlist() const {
        if (kind != DeviceKind::coupled) throw schema_error("device is not a coupled mixer");
        if (synthesis) {
            auto n = synthesize(synthesis_spec(), synthesis->prototype).netlist;
            n.name = name;
            return n;
        }
        Netlist n;
        n.name = name;
        n.provenance = provenance == "synthesized" ? Provenance::synthesized : Provenance::fitted;
        n.jrm = jrm;
        n.ca = ca;
        n.cb = cb;
        n.z0 = z0;
        n.arms = *arms;
        return n;
    }

    [[nodiscard]] static DeviceConfig from(const ResonantJMParams& p, std::string name) {
        DeviceConfig c;
        c.kind = DeviceKind::resonant;
        c.name = std::move(name);
        c.jrm = p.jrm;
        c.ca = p.ca;
        c.cb = p.cb;
        c.z0 = p.z0;
        return c;
    }

    [[nodiscard]] static DeviceConfig from(const Netlist& n) {
        DeviceConfig c;
        c.kind = DeviceKind::coupled;
        c.name = n.name;
        c.provenance = n.provenance == Provenance::synthesized ? "synthesized" : "fitted";
        c.jrm = n.jrm;
        c.ca = n.ca;
        c.cb = n.cb;
        c.z0 = n.z0;
        c.arms = n.arms;
        return c;
    }

    friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;
};

[[nodiscard]] inline json to_json(const DeviceConfig& c) {
    c.validate();
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = c.kind == DeviceKind::resonant ? "resonant" : "coupled";
    j["name"] = c.name;
    j["provenance"] = c.provenance;
    j["jrm"] = to_json(c.jrm);
    j["ca_f"] = c.ca;
    j["cb_f"] = c.cb;
    j["z0_ohm"] = c.z0;
    if (c.synthesis) {
        const auto& s = *c.synthesis;
        j["synthesis"] = {{"design_flux_phi0", s.design_flux_phi0},
                          {"negative_resistance_ohm", s.negative_resistance},
                          {"z2_ohm", s.z2},
                          {"role", to_string(s.role)},
                          {"prototype", s.prototype.g}};
    }
    if (c.arms) j["arms"] = {{"a", to_json((*c.arms)[0])}, {"b", to_json((*c.arms)[1])}};
    return j;
}

[[nodiscard]] inline DeviceConfig device_from_json(const json& j) {
    try {
        detail::check_version(j);
        DeviceConfig c;
        const auto kind = detail::need_string(j, "kind");
        if (kind == "resonant") c.kind = DeviceKind::resonant;
        else if (kind == "coupled") c.kind = DeviceKind::coupled;
        else throw schema_error("kind must be 'resonant' or 'coupled'");
        c.name = j.value("name", std::string{});
        c.provenance = j.value("provenance", std::string{"fitted"});
        c.jrm = jrm_from_json(detail::need(j, "jrm"));
        c.ca = detail::need_number(j, "ca_f");
        c.cb = detail::need_number(j, "cb_f");
        c.z0 = j.contains("z0_ohm") ? detail::need_number(j, "z0_ohm") : 50.0;
        if (j.contains("synthesis")) {
            const auto& s = j.at("synthesis");
            SynthesisBlock b;
            b.design_flux_phi0 = s.contains("design_flux_phi0") ? detail::need_number(s, "design_flux_phi0") : 0.6;
            b.negative_resistance = detail::need_array<2>(s, "negative_resistance_ohm");
            if (s.contains("z2_ohm")) b.z2 = detail::need_array<2>(s, "z2_ohm");
            b.role = role_from_string(s.value("role", std::string{"amplifier"}));
            b.prototype.g = detail::need_array<6>(s, "prototype");
            c.synthesis = b;
        }
        if (j.contains("arms")) {
            const auto& a = j.at("arms");
            c.arms = std::array<ArmNetwork, 2>{arm_from_json(detail::need(a, "a")), arm_from_json(detail::need(a, "b"))};
        }
        c.validate();
        c.jrm.validate();
        if (!(c.ca > 0.0) || !(c.cb > 0.0) || !(c.z0 > 0.0)) throw schema_error("capacitances and z0 must be positive");
        if (c.synthesis) {
            for (double r : c.synthesis->negative_resistance)
                if (!(r > 0.0)) throw schema_error("negative_resistance_ohm entries must be positive");
            c.synthesis->prototype.validate();
        }
        return c;
    } catch (const json::exception& e) {
        throw schema_error(std::string("malformed device JSON: ") + e.what());
    } catch (const domain_error& e) {
        throw schema_error(e.what());
    }
}

[[nodiscard]] inline DeviceConfig load_device(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw schema_error("cannot parse " + path.string() + ": " + e.what());
    }
    return device_from_json(j);
}

[[nodiscard]] inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- ripple setup -----------------------------------------------------------

[[nodiscard]] inline json to_json(const RippleSetup& s) {
    return {{"schema_version", schema_version}, {"t21", s.t21}, {"t32", s.t32}, {"t31", s.t31}, {"tc", s.tc},
            {"r22", s.r22}, {"cable_length_m", s.cable_length}, {"permittivity", s.permittivity}};
}

[[nodiscard]] inline RippleSetup ripple_from_json(const json& j) {
    try {
        detail::check_version(j);
        RippleSetup s{detail::need_number(j, "t21"), detail::need_number(j, "t32"), detail::need_number(j, "t31"),
                      detail::need_number(j, "tc"),  detail::need_number(j, "r22"), detail::need_number(j, "cable_length_m"),
                      detail::need_number(j, "permittivity")};
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw schema_error(std::string("malformed ripple setup: ") + e.what());
    } catch (const domain_error& e) {
        throw schema_error(e.what());
    }
}

// ---- CSV --------------------------------------------------------------------

namespace detail {
inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw schema_error("not a number: '" + s + "'");
    }
    if (used != s.size()) throw schema_error("not a number: '" + s + "'");
    return v;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw schema_error("CSV is missing column '" + name + "'");
    }
};

inline Table parse_table(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size()) throw schema_error("CSV row has the wrong number of cells");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double(c));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw schema_error("CSV has no header");
    return t;
}
} // namespace detail

[[nodiscard]] inline std::string sweep_csv(const SweepResult& s) {
    s.validate();
    std::string out = "freq_hz,idler_hz,singular";
    for (const auto& l : s.labels) out += fmt::format(",{0}_re,{0}_im,{0}_mag_db,{0}_phase_rad", l);
    out += "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += num(s.freq[i]) + "," + num(s.idler_freq.empty() ? 0.0 : s.idler_freq[i]) + "," +
               (s.singular.empty() ? "0" : std::to_string(int(s.singular[i])));
        for (const auto& t : s.traces) {
            const cplx z = t[i];
            out += "," + num(z.real()) + "," + num(z.imag()) + "," + num(std::isfinite(std::abs(z)) ? power_db(z) : std::nan("")) +
                   "," + num(std::arg(z));
        }
        out += "\n";
    }
    return out;
}

[[nodiscard]] inline SweepResult sweep_from_csv(const std::string& text) {
    const auto t = detail::parse_table(text);
    SweepResult s;
    const auto fcol = t.column("freq_hz");
    std::vector<std::string> labels;
    for (const auto& h : t.header)
        if (h.size() > 3 && h.substr(h.size() - 3) == "_re") labels.push_back(h.substr(0, h.size() - 3));
    s.labels = labels;
    s.traces.assign(labels.size(), {});
    const bool has_idler = std::find(t.header.begin(), t.header.end(), "idler_hz") != t.header.end();
    const bool has_flag = std::find(t.header.begin(), t.header.end(), "singular") != t.header.end();
    for (const auto& row : t.rows) {
        s.freq.push_back(row[fcol]);
        s.idler_freq.push_back(has_idler ? row[t.column("idler_hz")] : 0.0);
        s.singular.push_back(has_flag && row[t.column("singular")] != 0.0 ? 1 : 0);
        for (std::size_t k = 0; k < labels.size(); ++k)
            s.traces[k].emplace_back(row[t.column(labels[k] + "_re")], row[t.column(labels[k] + "_im")]);
    }
    require_increasing(s.freq, "sweep frequency column");
    s.validate();
    return s;
}

[[nodiscard]] inline json sweep_json(const SweepResult& s) {
    s.validate();
    json j;
    j["schema_version"] = schema_version;
    j["working_point"] = s.working_point;
    j["metrics"] = s.metrics;
    j["freq_hz"] = s.freq;
    j["idler_hz"] = s.idler_freq;
    j["singular"] = s.singular;
    json traces = json::object();
    for (std::size_t k = 0; k < s.labels.size(); ++k) {
        std::vector<double> re, im;
        for (auto z : s.traces[k]) {
            re.push_back(z.real());
            im.push_back(z.imag());
        }
        traces[s.labels[k]] = {{"re", re}, {"im", im}};
    }
    j["traces"] = traces;
    return j;
}

[[nodiscard]] inline std::string phase_map_csv(const PhaseMap& m) {
    std::string out = "flux_phi0,freq_hz,phase_rad\n";
    for (std::size_t r = 0; r < m.flux_phi0.size(); ++r)
        for (std::size_t c = 0; c < m.freq.size(); ++c)
            out += num(m.flux_phi0[r]) + "," + num(m.freq[c]) + "," + num(m.at(r, c)) + "\n";
    return out;
}

// Long-format flux map; every (flux, freq) pair of the grid must be present.
[[nodiscard]] inline PhaseMap phase_map_from_csv(const std::string& text) {
    const auto t = detail::parse_table(text);
    const auto cf = t.column("flux_phi0"), cq = t.column("freq_hz"), cp = t.column("phase_rad");
    std::map<double, std::map<double, double>> cells;
    for (const auto& row : t.rows) {
        if (!(row[cp] > -std::numbers::pi - 1e-12 && row[cp] <= std::numbers::pi + 1e-12))
            throw schema_error("phase values must lie in (-pi, pi]");
        if (!cells[row[cf]].emplace(row[cq], row[cp]).second) throw schema_error("duplicate flux-map cell");
    }
    PhaseMap m;
    for (const auto& [flux, col] : cells) {
        m.flux_phi0.push_back(flux);
        std::vector<double> freqs;
        for (const auto& [f, p] : col) freqs.push_back(f);
        if (m.freq.empty()) m.freq = freqs;
        else if (freqs != m.freq) throw schema_error("flux-map columns do not share one frequency grid");
        for (const auto& [f, p] : col) m.phase.push_back(p);
    }
    if (m.flux_phi0.empty()) throw schema_error("flux map is empty");
    return m;
}

[[nodiscard]] inline std::string resonances_csv(const ResonanceData& d) {
    std::string out = "flux_phi0,port,freq_hz\n";
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t r = 0; r < d.ports[p].size(); ++r)
            for (double f : d.ports[p][r]) out += num(d.flux_phi0[r]) + "," + std::to_string(p) + "," + num(f) + "\n";
    return out;
}

// Port column: 0 for a, 1 for b.
[[nodiscard]] inline ResonanceData resonances_from_csv(const std::string& text) {
    const auto t = detail::parse_table(text);
    const auto cf = t.column("flux_phi0"), cp = t.column("port"), cq = t.column("freq_hz");
    std::map<double, std::array<std::vector<double>, 2>> by_flux;
    for (const auto& row : t.rows) {
        if (row[cp] != 0.0 && row[cp] != 1.0) throw schema_error("port must be 0 (a) or 1 (b)");
        by_flux[row[cf]][static_cast<std::size_t>(row[cp])].push_back(row[cq]);
    }
    ResonanceData d;
    for (auto& [flux, ports] : by_flux) {
        d.flux_phi0.push_back(flux);
        for (std::size_t p = 0; p < 2; ++p) {
            std::sort(ports[p].begin(), ports[p].end());
            d.ports[p].push_back(ports[p]);
        }
    }
    return d;
}

[[nodiscard]] inline std::vector<NoiseSample> noise_from_csv(const std::string& text) {
    const auto t = detail::parse_table(text);
    const auto cg = t.column("gain_db"), cn = t.column("noise_rise_db");
    std::vector<NoiseSample> out;
    for (const auto& row : t.rows) out.push_back({std::pow(10.0, row[cg] / 10.0), std::pow(10.0, row[cn] / 10.0)});
    return out;
}

[[nodiscard]] inline std::string noise_csv(const std::vector<NoiseSample>& data) {
    std::string out = "gain_db,noise_rise_db\n";
    for (const auto& s : data) out += num(10.0 * std::log10(s.gain)) + "," + num(10.0 * std::log10(s.noise_rise)) + "\n";
    return out;
}

// ---- reports ----------------------------------------------------------------

[[nodiscard]] inline json to_json(const ThresholdInterval& t) {
    json j;
    j["defined"] = t.defined;
    j["bandwidth_hz"] = t.defined ? json(t.width()) : json(nullptr);
    j["low_hz"] = t.defined ? json(t.low) : json(nullptr);
    j["high_hz"] = t.defined ? json(t.high) : json(nullptr);
    return j;
}

[[nodiscard]] inline json to_json(const BandwidthMetrics& m) {
    json j;
    j["level_db"] = m.level_db;
    j["max_transmission_db"] = m.max_transmission_db;
    j["min_reflection_db"] = m.min_reflection_db;
    j["reflection_below_off_resonance"] = to_json(m.reflection_below_off);
    j["transmission_below_maximum"] = to_json(m.transmission_near_max);
    j["reflection_above_minimum"] = to_json(m.reflection_near_min);
    return j;
}


// ---- fit configuration and reports ------------------------------------------

[[nodiscard]] inline json to_json(const FitConfig& c) {
    json j;
    j["schema_version"] = schema_version;
    j["free"] = c.free;
    json b = json::object();
    for (const auto& [name, lh] : c.bounds) b[name] = {lh.first, lh.second};
    j["bounds"] = b;
    j["constraint_fraction"] = c.constraint_fraction;
    j["shared"] = c.shared;
    j["loss"] = c.loss == FitLoss::squared_hz ? "squared_hz" : "squared_relative";
    j["restarts"] = c.simplex.restarts;
    j["seed"] = c.simplex.seed;
    j["max_evaluations"] = c.simplex.max_evaluations;
    j["polish"] = c.polish;
    j["hops"] = c.hops;
    j["hop_fraction"] = c.hop_fraction;
    j["hop_patience"] = c.hop_patience;
    j["hop_simplex_evaluations"] = c.hop_simplex_evaluations;
    j["hop_stop_rms_hz"] = c.hop_stop_rms_hz;
    j["coarse_points"] = c.forward.coarse_points;
    j["probe"] = {{"pump_frequency_hz", c.forward.probe.pump_frequency}, {"alpha", c.forward.probe.alpha}};
    j["windows_hz"] = {{"a", {c.forward.windows[0].low, c.forward.windows[0].high}},
                       {"b", {c.forward.windows[1].low, c.forward.windows[1].high}}};
    j["min_flux_points"] = c.min_flux_points;
    return j;
}

// Every field is optional; absent fields keep the library defaults.
[[nodiscard]] inline FitConfig fit_config_from_json(const json& j) {
    try {
        detail::check_version(j);
        FitConfig c;
        if (j.contains("free")) c.free = j.at("free").get<std::vector<std::string>>();
        if (j.contains("bounds"))
            for (const auto& [name, v] : j.at("bounds").items()) {
                if (!v.is_array() || v.size() != 2) throw schema_error("bounds entries must be [low, high]");
                c.bounds[name] = {v[0].get<double>(), v[1].get<double>()};
            }
        if (j.contains("constraint_fraction")) c.constraint_fraction = detail::need_number(j, "constraint_fraction");
        if (j.contains("shared")) c.shared = j.at("shared").get<std::vector<std::string>>();
        if (j.contains("loss")) {
            const auto l = detail::need_string(j, "loss");
            if (l == "squared_hz") c.loss = FitLoss::squared_hz;
            else if (l == "squared_relative") c.loss = FitLoss::squared_relative;
            else throw schema_error("loss must be 'squared_hz' or 'squared_relative'");
        }
        if (j.contains("restarts")) c.simplex.restarts = j.at("restarts").get<int>();
        if (j.contains("seed")) c.simplex.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("max_evaluations")) c.simplex.max_evaluations = j.at("max_evaluations").get<int>();
        if (j.contains("polish")) c.polish = j.at("polish").get<bool>();
        if (j.contains("hops")) c.hops = j.at("hops").get<int>();
        if (j.contains("hop_fraction")) c.hop_fraction = detail::need_number(j, "hop_fraction");
        if (j.contains("hop_patience")) c.hop_patience = j.at("hop_patience").get<int>();
        if (j.contains("hop_simplex_evaluations")) c.hop_simplex_evaluations = j.at("hop_simplex_evaluations").get<int>();
        if (j.contains("hop_stop_rms_hz")) c.hop_stop_rms_hz = detail::need_number(j, "hop_stop_rms_hz");
        if (j.contains("coarse_points")) c.forward.coarse_points = j.at("coarse_points").get<std::size_t>();
        if (j.contains("min_flux_points")) c.min_flux_points = j.at("min_flux_points").get<std::size_t>();
        if (j.contains("probe")) {
            const auto& p = j.at("probe");
            c.forward.probe.pump_frequency = detail::need_number(p, "pump_frequency_hz");
            c.forward.probe.alpha = detail::need_number(p, "alpha");
        }
        if (j.contains("windows_hz")) {
            const auto& w = j.at("windows_hz");
            const auto a = detail::need_array<2>(w, "a"), b = detail::need_array<2>(w, "b");
            c.forward.windows = {FitWindow{a[0], a[1]}, FitWindow{b[0], b[1]}};
        }
        if (c.simplex.restarts < 1 || c.simplex.max_evaluations < 1) throw schema_error("restarts and max_evaluations must be positive");
        if (c.forward.coarse_points < 3) throw schema_error("coarse_points must be at least 3");
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw schema_error(std::string("malformed fit configuration: ") + e.what());
    } catch (const infeasible_bounds_error& e) {
        throw schema_error(e.what());
    } catch (const domain_error& e) {
        throw schema_error(e.what());
    }
}

template <class Device>
[[nodiscard]] json fit_report(const FitResult<Device>& r) {
    json j;
    j["schema_version"] = schema_version;
    j["report"] = "flux_map_fit";
    json params = json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i)
        params.push_back({{"name", r.names[i]}, {"value", r.values[i]}, {"lower", r.lower[i]}, {"upper", r.upper[i]}});
    j["parameters"] = params;
    j["loss"] = r.loss;
    j["initial_loss"] = r.initial_loss;
    j["rms_hz"] = r.rms_hz;
    j["initial_rms_hz"] = r.initial_rms_hz;
    j["matched_resonances"] = r.matched;
    j["converged"] = r.converged;
    j["evaluations"] = r.evaluations;
    j["best_restart"] = r.best_restart;
    return j;
}

[[nodiscard]] inline json noise_report(const NoiseFit& f, double f_mode, std::size_t samples) {
    json j;
    j["schema_version"] = schema_version;
    j["report"] = "noise_fit";
    j["mode_frequency_hz"] = f_mode;
    j["samples"] = samples;
    j["chain_temperature_k"] = f.params.chain_temperature;
    j["added_photons"] = f.params.added_photons;
    j["quantum_temperature_k"] = f.params.quantum_temperature;
    j["snr_plateau"] = snr_plateau(f.params);
    j["snr_plateau_db"] = 10.0 * std::log10(snr_plateau(f.params));
    j["rms_relative_residual"] = f.rms_relative_residual;
    j["confidence"] = f.confidence;
    j["converged"] = f.converged;
    j["evaluations"] = f.evaluations;
    return j;
}

} // namespace jmix::io
