#include "doctest.h"

#include "hetnoise/parallel.hpp"
#include "hetnoise/pipeline.hpp"
#include "hetnoise/rng.hpp"
#include "hetnoise/simulate.hpp"
#include "hetnoise/spectral.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

using namespace hetnoise;
using constants::pi;
using constants::two_pi;

namespace {

Scenario bench(double p_s = 0.5e-9, double duration = 0.016) {
    Scenario sc = pipeline::with_signal_power(pipeline::default_scenario(), p_s);
    sc.duration_s = duration;
    return sc;
}

double floor_db(const Scenario& sc, std::size_t averages = 0) {
    const auto psd = spectral::psd_estimate(synth_trace(sc, 1), sc.cfg.rbw_hz, averages, spectral::Window::Hann,
                                            sc.cfg.gain);
    return spectral::density_dbm_per_hz(spectral::floor_density(psd, sc.beat_hz(), 100e3, 10e3));
}

} // namespace

TEST_CASE("substreams depend only on (seed, stream, index)") {
    auto a = rng::substream(5, rng::Stream::Noise, 3);
    auto b = rng::substream(5, rng::Stream::Noise, 3);
    CHECK(a() == b());
    CHECK(rng::substream(5, rng::Stream::Noise, 3)() != rng::substream(5, rng::Stream::Noise, 4)());
    CHECK(rng::substream(5, rng::Stream::Noise, 3)() != rng::substream(5, rng::Stream::Jitter, 3)());
    CHECK(rng::substream(5, rng::Stream::Noise, 3)() != rng::substream(6, rng::Stream::Noise, 3)());
}

TEST_CASE("parallel_for covers every index once and rethrows") {
    for (unsigned w : {1u, 2u, 5u}) {
        std::vector<std::atomic<int>> hits(37);
        parallel_for(hits.size(), w, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(10, w, [](std::size_t i) { if (i == 7) throw config_error("x"); }), config_error);
    }
}

TEST_CASE("traces are bit-identical across worker counts") {
    Scenario sc = bench(1e-9, 0.02);
    sc.phases.mode = Scanned{200.0, 0.05, 1e-3};
    sc.cyclostationary = true;
    const auto ref = synth_trace(sc, 1);
    for (unsigned w : {2u, 3u, 8u}) {
        const auto t = synth_trace(sc, w);
        REQUIRE(t.samples.size() == ref.samples.size());
        CHECK(std::memcmp(t.samples.data(), ref.samples.data(), ref.samples.size() * sizeof(double)) == 0);
    }
    const auto scan1 = phase_scan_trace(sc, 1);
    const auto scan4 = phase_scan_trace(sc, 4);
    CHECK(scan1.trace.samples == scan4.trace.samples);
    CHECK(scan1.record.phase_rad == scan4.record.phase_rad);
    CHECK(scan1.trace.samples == ref.samples);
}

TEST_CASE("trace metadata and seed sensitivity") {
    Scenario sc = bench();
    const auto a = synth_trace(sc);
    CHECK(a.samples.size() == static_cast<std::size_t>(std::llround(sc.duration_s * sc.sample_rate_hz)));
    CHECK(a.sample_rate_hz == sc.sample_rate_hz);
    CHECK(a.seed == sc.seed);
    CHECK(a.scenario_digest.size() == 16);
    sc.seed += 1;
    const auto b = synth_trace(sc);
    CHECK(a.samples != b.samples);
    CHECK(a.scenario_digest != b.scenario_digest);
}

TEST_CASE("scenario validation") {
    Scenario sc = bench();
    CHECK_NOTHROW(sc.validate());

    Scenario slow = sc;
    slow.sample_rate_hz = 9.0 * sc.beat_hz();
    CHECK_THROWS_AS(slow.validate(), config_error);

    Scenario shorter = sc;
    shorter.duration_s = 0.5e-3;
    CHECK_THROWS_AS(shorter.validate(), config_error);

    Scenario fast = sc;
    fast.phases.mode = Scanned{two_pi * 2e3, 0.0, 1e-3};
    CHECK_THROWS_AS(fast.validate(), config_error);

    Scenario mono = sc;
    const double ws = sc.sig.omega_s, w = two_pi * sc.beat_hz();
    mono.lo = make_mono_lo(ws - w, lo_amplitude(sc.lo), 0.0);
    mono.images = ImageBandSet::for_geometry(mono.sig, mono.lo);
    CHECK_THROWS_AS(mono.validate(), config_error); // cancellation needs a BLO
    mono.hyp = NoiseHypothesis::StandardImageVacuum;
    CHECK_NOTHROW(mono.validate());
    mono.cyclostationary = true;
    CHECK_THROWS_AS(mono.validate(), config_error);

    Scenario squeezed = sc;
    squeezed.sig.state = TwoModeSqueezed{0.3};
    CHECK_THROWS_AS(squeezed.validate(), unsupported_error);

    Scenario asym = sc;
    std::get<BichromaticLo>(asym.lo).omega_2 -= two_pi * 1e3;
    CHECK_THROWS_AS(asym.validate(), config_error);

    CHECK_THROWS_AS(phase_scan_trace(sc), config_error);
}

TEST_CASE("realized phase") {
    Scenario sc = bench();
    sc.phases.mode = Locked{1};
    CHECK(realized_phase(sc) == doctest::Approx(pi));
    sc.phases.mode = Averaged{};
    const double a = realized_phase(sc);
    CHECK(a == realized_phase(sc));
    sc.seed = 99;
    CHECK(a != realized_phase(sc));
    sc.phases.mode = Scanned{10.0, 0.0, 1e-3};
    sc.phases.phi_s = 0.4;
    CHECK(realized_phase(sc) == doctest::Approx(0.4));
}

TEST_CASE("simulated floor matches the injected density") {
    const Scenario sc = bench(0.0, 0.1);
    const double expect = spectral::density_dbm_per_hz(sc.cfg.gain * injected_noise_density(sc));
    CHECK(std::abs(floor_db(sc) - expect) < 0.1);
}

TEST_CASE("hypotheses differ by 3.01 dB in the simulated floor") {
    Scenario can = bench(0.0, 0.1);
    Scenario std_h = can;
    std_h.hyp = NoiseHypothesis::StandardImageVacuum;
    std_h.seed = 77;
    CHECK(std::abs(floor_db(std_h) - floor_db(can) - 10.0 * std::log10(2.0)) < 0.3);
}

TEST_CASE("floor does not depend on the sample rate") {
    Scenario a = bench(0.0, 0.06);
    Scenario b = a;
    b.sample_rate_hz = 24.0 * a.beat_hz();
    CHECK(std::abs(floor_db(a) - floor_db(b)) < 0.1);
}

TEST_CASE("cyclostationary noise preserves the time-averaged density") {
    for (auto hyp : {NoiseHypothesis::StandardImageVacuum, NoiseHypothesis::VacuumCancellation}) {
        Scenario plain = bench(0.0, 0.3);
        plain.hyp = hyp;
        Scenario cyc = plain;
        cyc.cyclostationary = true;
        CHECK(std::abs(floor_db(plain) - floor_db(cyc)) < 0.05);
    }
}

TEST_CASE("dark noise adds to the floor") {
    Scenario sc = bench(0.0, 0.05);
    const double shot = injected_noise_density(sc);
    sc.dark_density_a2_per_hz = shot;
    CHECK(injected_noise_density(sc) == doctest::Approx(2.0 * shot));
    sc.dark_density_a2_per_hz = -1.0;
    CHECK_THROWS_AS(sc.validate(), config_error);
}

TEST_CASE("phase scan record follows cos^2 with no jitter") {
    Scenario sc = bench(2e-9, 0.01);
    sc.phases.mode = Scanned{two_pi / 0.01, 0.0, 1e-3};
    const auto res = phase_scan_trace(sc, 1, 512);
    REQUIRE(res.record.t_s.size() > 100);
    const auto& b = std::get<BichromaticLo>(sc.lo);
    const double amp = analytic::blo_beat_amplitude(sc.sig, b, sc.cfg);
    double max_amp = 0.0;
    for (std::size_t i = 0; i < res.record.t_s.size(); ++i) {
        const double expected_phase = sc.phases.phi_prime() + two_pi / 0.01 * res.record.t_s[i];
        CHECK(std::cos(res.record.phase_rad[i]) == doctest::Approx(std::cos(expected_phase)).epsilon(1e-9));
        CHECK(std::abs(res.record.beat_amplitude_a[i]) ==
              doctest::Approx(amp * std::abs(std::cos(res.record.phase_rad[i]))).epsilon(1e-9).scale(amp));
        max_amp = std::max(max_amp, std::abs(res.record.beat_amplitude_a[i]));
    }
    CHECK(max_amp == doctest::Approx(amp).epsilon(1e-3));
}

TEST_CASE("phase jitter has the requested RMS") {
    Scenario sc = bench(2e-9, 0.5);
    sc.phases.mode = Scanned{0.0, 0.1, 1e-3};
    const auto res = phase_scan_trace(sc, 1, 4096);
    double sq = 0.0;
    for (double p : res.record.phase_rad) {
        const double d = std::remainder(p - sc.phases.phi_prime(), two_pi);
        sq += d * d;
    }
    CHECK(std::sqrt(sq / res.record.phase_rad.size()) == doctest::Approx(0.1).epsilon(0.25));
}
