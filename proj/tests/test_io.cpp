#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "jmix/devices.hpp"
#include "jmix/io.hpp"

using namespace jmix;
using io::json;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir() {
    auto d = fs::temp_directory_path() / ("jmix_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::create_directories(d);
    return d;
}

io::DeviceConfig from_file(const char* name) { return io::load_device(fs::path(JMIX_CONFIG_DIR) / name); }
} // namespace

TEST(DeviceJson, ResonantRoundTrip) {
    const auto c = io::DeviceConfig::from(devices::jm1(), "JM1");
    const auto back = io::device_from_json(json::parse(io::dump(io::to_json(c))));
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.resonant().ca, devices::jm1().ca);
}

TEST(DeviceJson, NetlistRoundTripIsBitExact) {
    for (const auto& n : {devices::jm3(), devices::jm4()}) {
        const auto c = io::DeviceConfig::from(n);
        const auto back = io::device_from_json(json::parse(io::dump(io::to_json(c))));
        EXPECT_EQ(back, c);
        const auto net = back.netlist();
        for (int k = 0; k < 2; ++k) EXPECT_EQ(net.arms[k].coupling, n.arms[k].coupling);
    }
}

TEST(DeviceJson, PrototypeRoundTripResynthesizes) {
    const auto c = from_file("jm4_design.json");
    ASSERT_TRUE(c.synthesis.has_value());
    EXPECT_EQ(c.synthesis->prototype.g, devices::jm4_prototype().g);
    const auto again = io::device_from_json(io::to_json(c));
    EXPECT_EQ(again, c);
    const auto a = c.netlist(), b = again.netlist();
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(a.arms[k].inductance, b.arms[k].inductance);
        EXPECT_EQ(a.arms[k].capacitance, b.arms[k].capacitance);
    }
}

TEST(DeviceJson, ShippedConfigsLoad) {
    for (const char* name : {"jm1.json", "jm2.json", "jm3.json", "jm4.json", "jm3_design.json", "jm4_design.json"})
        EXPECT_NO_THROW((void)from_file(name)) << name;
    const auto jm3 = from_file("jm3.json").netlist();
    EXPECT_EQ(jm3.arms[0].coupling, devices::jm3().arms[0].coupling);
}

TEST(DeviceJson, SchemaErrors) {
    auto good = io::to_json(io::DeviceConfig::from(devices::jm1(), "JM1"));
    auto bad = good;
    bad["schema_version"] = 2;
    EXPECT_THROW((void)io::device_from_json(bad), schema_error);
    bad = good;
    bad.erase("schema_version");
    EXPECT_THROW((void)io::device_from_json(bad), schema_error);
    bad = good;
    bad["ca_f"] = "six";
    EXPECT_THROW((void)io::device_from_json(bad), schema_error);
    bad = good;
    bad["ca_f"] = -1.0;
    EXPECT_THROW((void)io::device_from_json(bad), schema_error);
    bad = good;
    bad["kind"] = "coupled"; // neither synthesis nor arms
    EXPECT_THROW((void)io::device_from_json(bad), schema_error);
    bad = good;
    bad["jrm"]["critical_current_a"] = 0.0;
    EXPECT_THROW((void)io::device_from_json(bad), schema_error);
    auto both = io::to_json(from_file("jm4_design.json"));
    both["arms"] = io::to_json(io::DeviceConfig::from(devices::jm4()))["arms"];
    EXPECT_THROW((void)io::device_from_json(both), schema_error);
}

TEST(SweepCsv, RoundTripPreservesEveryColumn) {
    const WorkingPoint wp{FluxBias::from_flux_quanta(0.3), 3e9, PumpAlpha{0.004}, 0.0};
    const auto sw = sparams(devices::jm2(), wp, linspace(6e9, 8e9, 101), MixingMode::conversion);
    const auto back = io::sweep_from_csv(io::sweep_csv(sw));
    ASSERT_EQ(back.size(), sw.size());
    EXPECT_EQ(back.labels, sw.labels);
    EXPECT_EQ(back.freq, sw.freq);
    EXPECT_EQ(back.idler_freq, sw.idler_freq);
    EXPECT_EQ(back.singular, sw.singular);
    for (std::size_t k = 0; k < sw.traces.size(); ++k) EXPECT_EQ(back.traces[k], sw.traces[k]);
}

TEST(SweepCsv, RejectsMalformedInput) {
    EXPECT_THROW((void)io::sweep_from_csv(""), schema_error);
    EXPECT_THROW((void)io::sweep_from_csv("freq_hz,S11_re,S11_im\n1,2\n"), schema_error);
    EXPECT_THROW((void)io::sweep_from_csv("freq_hz,S11_re,S11_im\n1,x,0\n"), schema_error);
    EXPECT_THROW((void)io::sweep_from_csv("freq_hz,S11_re,S11_im\n2,0,0\n1,0,0\n"), domain_error);
}

TEST(PhaseMapCsv, RoundTripAndGridChecks) {
    const auto m = resonance_map(devices::jm1(), {0.0, 0.5}, linspace(6e9, 9e9, 31), Mode::a);
    const auto back = io::phase_map_from_csv(io::phase_map_csv(m));
    EXPECT_EQ(back.flux_phi0, m.flux_phi0);
    EXPECT_EQ(back.freq, m.freq);
    EXPECT_EQ(back.phase, m.phase);
    EXPECT_THROW((void)io::phase_map_from_csv("flux_phi0,freq_hz,phase_rad\n0,1,4.0\n"), schema_error);
    EXPECT_THROW((void)io::phase_map_from_csv("flux_phi0,freq_hz,phase_rad\n0,1,0\n0,1,0\n"), schema_error);
    EXPECT_THROW((void)io::phase_map_from_csv("flux_phi0,freq_hz,phase_rad\n0,1,0\n0,2,0\n1,1,0\n"), schema_error);
}

TEST(ResonanceCsv, RoundTrip) {
    ResonanceData d;
    d.flux_phi0 = {0.0, 0.25};
    d.ports[0] = {{6.5e9, 7.25e9}, {6.4e9}};
    d.ports[1] = {{10.1e9}, {}};
    const auto back = io::resonances_from_csv(io::resonances_csv(d));
    EXPECT_EQ(back.flux_phi0, d.flux_phi0);
    EXPECT_EQ(back.ports, d.ports);
    EXPECT_THROW((void)io::resonances_from_csv("flux_phi0,port,freq_hz\n0,2,1e9\n"), schema_error);
}

TEST(NoiseCsv, RoundTripInDecibels) {
    const std::vector<NoiseSample> s{{1.0, 0.9}, {10.0, 1.7}, {1000.0, 40.0}};
    const auto back = io::noise_from_csv(io::noise_csv(s));
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(back[i].gain, s[i].gain, 1e-12 * s[i].gain);
        EXPECT_NEAR(back[i].noise_rise, s[i].noise_rise, 1e-12 * s[i].noise_rise);
    }
}

TEST(FitConfigJson, RoundTripAndDefaults) {
    FitConfig c;
    c.free = {"Lin", "Ca"};
    c.bounds["Ca"] = {5e-12, 7e-12};
    c.simplex.seed = 17;
    c.hops = 3;
    c.hop_fraction = 0.05;
    c.forward.coarse_points = 301;
    const auto back = io::fit_config_from_json(io::to_json(c));
    EXPECT_EQ(back.free, c.free);
    EXPECT_EQ(back.bounds, c.bounds);
    EXPECT_EQ(back.simplex.seed, 17u);
    EXPECT_EQ(back.hops, 3);
    EXPECT_EQ(back.hop_fraction, 0.05);
    EXPECT_EQ(back.forward.coarse_points, 301u);
    const auto defaults = io::fit_config_from_json(json{{"schema_version", io::schema_version}});
    EXPECT_EQ(defaults.hops, FitConfig{}.hops);
    EXPECT_EQ(defaults.simplex.restarts, FitConfig{}.simplex.restarts);
}

TEST(FitConfigJson, SchemaErrors) {
    const json v{{"schema_version", io::schema_version}};
    auto with = [&](const char* key, json value) {
        auto j = v;
        j[key] = std::move(value);
        return j;
    };
    EXPECT_THROW((void)io::fit_config_from_json(with("loss", "l1")), schema_error);
    EXPECT_THROW((void)io::fit_config_from_json(with("restarts", 0)), schema_error);
    EXPECT_THROW((void)io::fit_config_from_json(with("constraint_fraction", 2.0)), schema_error);
    EXPECT_THROW((void)io::fit_config_from_json(with("hop_fraction", 0.0)), schema_error);
    EXPECT_THROW((void)io::fit_config_from_json(with("bounds", json{{"Ca", json::array({1.0})}})), schema_error);
    EXPECT_THROW((void)io::fit_config_from_json(with("free", 3)), schema_error);
}

TEST(RippleJson, RoundTripAndValidation) {
    const auto s = reference_ripple_setup();
    const auto back = io::ripple_from_json(io::to_json(s));
    EXPECT_EQ(back.cable_length, s.cable_length);
    EXPECT_EQ(back.permittivity, s.permittivity);
    EXPECT_EQ(back.r22, s.r22);
    auto bad = io::to_json(s);
    bad["tc"] = 1.2;
    EXPECT_THROW((void)io::ripple_from_json(bad), schema_error);
    const auto shipped = io::ripple_from_json(json::parse(io::read_file(fs::path(JMIX_CONFIG_DIR) / "ripple_setup.json")));
    EXPECT_EQ(shipped.cable_length, s.cable_length);
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary) {
    const auto dir = scratch_dir();
    const auto target = dir / "out.json";
    io::atomic_write(target, "first\n");
    io::atomic_write(target, "second\n");
    EXPECT_EQ(io::read_file(target), "second\n");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
    EXPECT_EQ(entries, 1u);
    EXPECT_THROW(io::atomic_write(dir / "missing" / "x.json", "x"), error);
    EXPECT_EQ(io::read_file(target), "second\n");
    fs::remove_all(dir);
}

TEST(NumberFormat, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 6.1e-12, -2.5e9, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(io::num(v)), v);
    EXPECT_EQ(io::num(std::nan("")), "nan");
    EXPECT_EQ(io::num(-std::numeric_limits<double>::infinity()), "-inf");
}
