#include "doctest.h"

#include "hetnoise/pipeline.hpp"
#include "hetnoise/scenario_io.hpp"

#include <cmath>
#include <sstream>

using namespace hetnoise;

TEST_CASE("SI-prefixed quantities") {
    CHECK(parse_quantity("p", "0.5nW", ValueKind::Power) == doctest::Approx(0.5e-9));
    CHECK(parse_quantity("p", "2mW", ValueKind::Power) == doctest::Approx(2e-3));
    CHECK(parse_quantity("p", "2 mW", ValueKind::Power) == doctest::Approx(2e-3));
    CHECK(parse_quantity("f", "1.3MHz", ValueKind::Frequency) == doctest::Approx(1.3e6));
    CHECK(parse_quantity("f", "10kHz", ValueKind::Frequency) == doctest::Approx(1e4));
    CHECK(parse_quantity("l", "1064nm", ValueKind::Length) == doctest::Approx(1.064e-6));
    CHECK(parse_quantity("t", "1ms", ValueKind::Time) == doctest::Approx(1e-3));
    CHECK(parse_quantity("a", "90deg", ValueKind::Angle) == doctest::Approx(constants::pi / 2));
    CHECK(parse_quantity("a", "0.5pi", ValueKind::Angle) == doctest::Approx(constants::pi / 2));
    CHECK(parse_quantity("x", "42", ValueKind::Real) == 42.0);
    CHECK_THROWS_AS(parse_quantity("p", "2mHz", ValueKind::Power), config_error);
    CHECK_THROWS_AS(parse_quantity("p", "2xW", ValueKind::Power), config_error);
    CHECK_THROWS_AS(parse_quantity("p", "abc", ValueKind::Power), config_error);
    try {
        parse_quantity("lo_power", "abc", ValueKind::Power);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).rfind("lo_power", 0) == 0);
    }
}

TEST_CASE("defaults build the bench scenario") {
    const Scenario sc = ScenarioParams{}.build();
    CHECK(sc.is_bichromatic());
    CHECK(sc.beat_hz() == doctest::Approx(1.3e6));
    CHECK(sc.sample_rate_hz == doctest::Approx(16 * 1.3e6));
    CHECK(sc.cfg.eta == 0.7);
    CHECK(sc.cfg.gain == kCalibratedGain);
    CHECK(sc.cfg.measurement_time() == doctest::Approx(1e-3));
    CHECK(sc.hyp == NoiseHypothesis::VacuumCancellation);
    CHECK(std::holds_alternative<Averaged>(sc.phases.mode));
    CHECK(pipeline::signal_power_w(sc) == doctest::Approx(0.5e-9).epsilon(1e-12));
    CHECK(lo_amplitude(sc.lo) * lo_amplitude(sc.lo) ==
          doctest::Approx(analytic::photon_flux(2e-3, 1.064e-6)).epsilon(1e-12));
    CHECK(ScenarioParams{}.overridden().empty());
}

TEST_CASE("unknown keys and bad values name the key") {
    ScenarioParams p;
    try {
        p.set("lo_pwr", "1");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("lo_pwr") != std::string::npos);
    }
    try {
        p.set("hypothesis", "maybe");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("hypothesis") != std::string::npos);
    }
    CHECK_THROWS_AS(p.set("seed", "-3"), config_error);
    CHECK_THROWS_AS(p.set("cyclostationary", "sometimes"), config_error);
    CHECK_THROWS_AS(p.merge_text("rbw 1000\n"), config_error);
    CHECK_THROWS_AS(p.merge_file("/nonexistent/file.scn"), config_error);
}

TEST_CASE("invalid physics is rejected at build") {
    ScenarioParams p;
    p.set("lo_kind", "mono");
    CHECK_THROWS_AS(p.build(), config_error); // cancellation with a mono LO
    p.set("hypothesis", "standard");
    CHECK_NOTHROW(p.build());
    p.set("sample_rate", "5MHz");
    CHECK_THROWS_AS(p.build(), config_error);
    ScenarioParams q;
    q.set("eta", "1.5");
    CHECK_THROWS_WITH_AS(q.build(), doctest::Contains("eta"), config_error);
    ScenarioParams r;
    r.set("state", "squeezed");
    r.set("squeeze_s", "0.5");
    CHECK_THROWS_AS(r.build(), unsupported_error);
}

TEST_CASE("overrides are last-wins and recorded in order") {
    ScenarioParams p;
    p.merge_text("# bench\nrbw = 3kHz\nseed = 4\n\nrbw = 2kHz  # inline comment\n");
    CHECK(p.number("rbw") == 2000.0);
    p.set("seed", "9");
    CHECK(p.overridden() == std::vector<std::string>{"rbw", "seed"});
    p.set("rbw", "1kHz");
    CHECK(p.overridden() == std::vector<std::string>{"seed", "rbw"});
    CHECK(p.get("seed") == "9");
}

TEST_CASE("dumped scenario re-parses to the same digest") {
    ScenarioParams p;
    p.set("signal_power", "1.7nW");
    p.set("phase_mode", "locked");
    p.set("lock_k", "2");
    p.set("phi_1", "30deg");
    p.set("cyclostationary", "yes");
    p.set("seed", "18446744073709551615");
    ScenarioParams q;
    q.merge_text(p.dump());
    CHECK(q == p);
    CHECK(scenario_digest(q.build()) == scenario_digest(p.build()));
    CHECK(canonical_text(q.build()) == canonical_text(p.build()));
}

TEST_CASE("digest reacts to every field") {
    const Scenario base = ScenarioParams{}.build();
    const std::string d0 = scenario_digest(base);
    CHECK(d0.size() == 16);
    CHECK(d0.find_first_not_of("0123456789abcdef") == std::string::npos);
    for (const auto& k : scenario_keys()) {
        // signal_power_err feeds the NF error bars, not the simulated scenario
        if (k.kind == ValueKind::Choice || k.name == "signal_power_err") continue;
        ScenarioParams p;
        std::string v;
        switch (k.kind) {
        case ValueKind::Flag: v = "true"; break;
        case ValueKind::Integer:
        case ValueKind::Seed: v = "3"; break;
        default: v = std::to_string(p.number(k.name) * 1.01 + 1e-3); break;
        }
        if (k.name == "eta") v = "0.5";
        if (k.name == "sample_rate") v = "30MHz";
        if (k.name == "t_meas") v = "2ms";
        if (k.name == "lock_k" || k.name == "scan_rate" || k.name == "jitter_rms" || k.name == "jitter_tau") {
            p.set("phase_mode", "scan");
            if (k.name == "lock_k") p.set("phase_mode", "locked");
        }
        if (k.name == "squeeze_s") {
            p.set("lo_kind", "mono");
            p.set("hypothesis", "standard");
            p.set("state", "squeezed");
        }
        p.set(k.name, v);
        Scenario sc;
        REQUIRE_NOTHROW(sc = p.build());
        ScenarioParams ref;
        for (const auto& name : p.overridden())
            if (name != k.name) ref.set(name, p.get(name));
        INFO(k.name);
        CHECK(scenario_digest(sc) != scenario_digest(ref.build()));
    }
}

TEST_CASE("binary trace round trip") {
    Scenario sc = ScenarioParams{}.build();
    const auto tr = synth_trace(sc);
    std::stringstream ss;
    write_trace_binary(ss, tr, artifact_header(sc));
    const auto back = read_trace_binary(ss);
    CHECK(back.samples == tr.samples);
    CHECK(back.sample_rate_hz == tr.sample_rate_hz);
    CHECK(back.seed == tr.seed);
    CHECK(back.scenario_digest == tr.scenario_digest);
    std::stringstream bad("not a trace\n\n");
    CHECK_THROWS_AS(read_trace_binary(bad), config_error);
}

TEST_CASE("artifact header carries version, digest and seed") {
    ScenarioParams p;
    p.set("seed", "7");
    const Scenario sc = p.build();
    const auto h = artifact_header(sc, p.overridden());
    REQUIRE(h.size() == 4);
    CHECK(h[0] == "tool=" + tool_version());
    CHECK(h[1] == "scenario_digest=" + scenario_digest(sc));
    CHECK(h[2] == "seed=7");
    CHECK(h[3] == "overrides=seed");
    std::ostringstream csv;
    PhotocurrentTrace tiny;
    tiny.sample_rate_hz = 10.0;
    tiny.samples = {1.0, -2.0};
    write_trace_csv(csv, tiny, h);
    CHECK(csv.str().rfind("# tool=", 0) == 0);
    CHECK(csv.str().find("t_s,current_a") != std::string::npos);
}
