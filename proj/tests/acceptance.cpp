// Acceptance suite: one PASS/FAIL line per criterion, details indented below.

#include "hetnoise/analytic.hpp"
#include "hetnoise/pipeline.hpp"
#include "hetnoise/simulate.hpp"
#include "hetnoise/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace hetnoise;
using namespace hetnoise::pipeline;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> details;
    bool pass = true;

    void check(bool ok, const std::string& what) {
        details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
        pass = pass && ok;
    }
    void absorb(const ExperimentResult& r) {
        for (const auto& c : r.checks) {
            std::ostringstream os;
            os << c.name << " = " << std::fixed << std::setprecision(3) << c.value << " in [" << c.nominal - c.err_minus
               << ", " << c.nominal + c.err_plus << "]";
            check(c.pass, os.str());
        }
    }
};

std::string num(double v, int prec = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const double kThree = 10.0 * std::log10(2.0);

Criterion nf_matrix() {
    Criterion c{1, "analytic NF matrix exact to 1e-12 dB in under 1 s", {}};
    using analytic::DetectorKind;
    const auto t0 = std::chrono::steady_clock::now();
    struct Row {
        std::string name;
        DetectorKind kind;
        PhaseMode mode;
        NoiseHypothesis hyp;
        double expected;
    };
    const std::vector<Row> rows{
        {"homodyne", DetectorKind::Homodyne, Locked{0}, NoiseHypothesis::StandardImageVacuum, 0.0},
        {"mono heterodyne", DetectorKind::MonoHeterodyne, Averaged{}, NoiseHypothesis::StandardImageVacuum, kThree},
        {"BLO standard", DetectorKind::BloHeterodyne, Averaged{}, NoiseHypothesis::StandardImageVacuum, kThree},
        {"BLO cancel averaged", DetectorKind::BloHeterodyne, Averaged{}, NoiseHypothesis::VacuumCancellation, 0.0},
        {"BLO cancel locked", DetectorKind::BloHeterodyne, Locked{0}, NoiseHypothesis::VacuumCancellation, -kThree},
    };
    for (const auto& r : rows) {
        const double nf = analytic::nf_predicted(r.kind, r.mode, r.hyp);
        c.check(std::abs(nf - r.expected) < 1e-12, r.name + ": " + num(nf, 12) + " dB");
    }
    const double dt = seconds_since(t0);
    c.check(dt < 1.0, "runtime " + num(dt, 4) + " s");
    return c;
}

Criterion table2() {
    Criterion c{2, "table2 sweep: SNR_in within 0.2 dB, NF inside each row band, under 2 min at 100 seeds", {}};
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = reproduce_table2({100, 1, 0});
    const double dt = seconds_since(t0);
    c.absorb(r);
    for (std::size_t i = 0; i < r.rows.size(); ++i)
        c.details.push_back("info  row " + std::to_string(i + 1) + " SNR_out " + num(r.rows[i].snr_out_db) +
                            " dB, MC - analytic " + num(r.oracle_delta_db[i]) + " dB");
    c.check(dt < 120.0, "runtime " + num(dt, 1) + " s");
    return c;
}

Criterion fig6() {
    Criterion c{3, "fig6 floors: calibrated floors, LO doubling delta, beatnote floor on the shot-noise floor", {}};
    const auto r = reproduce_fig6({100, 1, 0});
    c.absorb(r.summary);
    return c;
}

Criterion locked() {
    Criterion c{4, "locked-phase check: SNR_out 66.2 +-0.5 dB, NF -3.0 dB inside -3.5 +0.9/-1.2", {}};
    c.absorb(reproduce_locked({100, 1, 0}));
    return c;
}

Criterion properties() {
    Criterion c{5, "property suites", {}};

    // oracle closure and hypothesis discrimination over the default grid
    NfOptions opts;
    opts.n_windows = 8;
    double worst = 0.0;
    double min_sep = 1e9;
    for (double p : {0.5e-9, 1e-9, 2e-9}) {
        double nf_avg[2] = {0.0, 0.0};
        for (auto hyp : {NoiseHypothesis::StandardImageVacuum, NoiseHypothesis::VacuumCancellation}) {
            for (const PhaseMode& mode : {PhaseMode{Averaged{}}, PhaseMode{Locked{0}}}) {
                Scenario sc = with_signal_power(default_scenario(), p);
                sc.hyp = hyp;
                sc.phases.mode = mode;
                const auto m = measure_nf(sc, 100, opts);
                worst = std::max(worst, std::abs(m.report.snr_out_db - m.analytic_snr_out_db));
                if (std::holds_alternative<Averaged>(mode))
                    nf_avg[hyp == NoiseHypothesis::StandardImageVacuum ? 0 : 1] = m.report.nf_db;
            }
        }
        min_sep = std::min(min_sep, nf_avg[0] - nf_avg[1]);
    }
    c.check(worst < 0.3, "oracle closure: worst |MC - analytic| SNR_out = " + num(worst, 4) + " dB over 12 scenarios");
    c.check(min_sep >= 2.5, "hypothesis discrimination: min NF(standard) - NF(cancel) = " + num(min_sep) + " dB");

    // squeezed formula at s = 0 versus the coherent formula
    {
        const Scenario base = default_scenario();
        const double ws = base.sig.omega_s, w = constants::two_pi * base.beat_hz();
        const auto lo = make_mono_lo(ws - w, lo_amplitude(base.lo), 0.0);
        bool exact = true;
        for (const PhaseMode& mode : {PhaseMode{Averaged{}}, PhaseMode{Locked{0}}, PhaseMode{Locked{1}}}) {
            PhaseConfig ph;
            ph.mode = mode;
            const auto coh = analytic::mono_heterodyne_powers(base.sig, lo, ph, base.cfg);
            SignalField sq = base.sig;
            sq.state = TwoModeSqueezed{0.0};
            const auto s0 = analytic::mono_heterodyne_powers(sq, lo, ph, base.cfg);
            exact = exact && s0.p_i_w == coh.p_i_w && s0.p_n_w_per_hz == coh.p_n_w_per_hz;
        }
        c.check(exact, "squeezed-input powers at s = 0 equal the coherent powers bit for bit");
    }

    // C = 0 / C = -1 against the two hypotheses
    {
        const Scenario base = default_scenario();
        const auto& b = std::get<BichromaticLo>(base.lo);
        const auto s = analytic::blo_powers(base.sig, b, base.phases, NoiseHypothesis::StandardImageVacuum, base.cfg);
        const auto k = analytic::blo_powers(base.sig, b, base.phases, NoiseHypothesis::VacuumCancellation, base.cfg);
        c.check(analytic::correlation_noise_power(b.e_l, 0.0, base.cfg) == s.p_n_w_per_hz &&
                    analytic::correlation_noise_power(b.e_l, -1.0, base.cfg) == k.p_n_w_per_hz,
                "correlation noise power with C = 0 and C = -1 equals the standard and cancellation densities");
    }

    // NF invariance under LO power and gain
    {
        NfOptions o;
        o.n_windows = 8;
        const Scenario base = with_signal_power(default_scenario(), 1e-9);
        const double nf0 = measure_nf(base, 20, o).report.nf_db;
        double drift = 0.0;
        for (double lo_w : {0.5e-3, 1e-3, 4e-3})
            drift = std::max(drift, std::abs(measure_nf(with_lo_power(base, lo_w), 20, o).report.nf_db - nf0));
        for (double g : {1.0, 1e3, 1e8}) {
            Scenario sc = base;
            sc.cfg.gain = g;
            drift = std::max(drift, std::abs(measure_nf(sc, 20, o).report.nf_db - nf0));
        }
        c.check(drift < 0.05, "NF drift under LO power {0.5,1,4} mW and gain {1,1e3,1e8}: " + num(drift, 4) + " dB");
    }

    // bit-deterministic traces independent of worker count
    {
        Scenario sc = with_signal_power(default_scenario(), 1e-9);
        sc.duration_s = 0.03;
        sc.cyclostationary = true;
        sc.phases.mode = Scanned{100.0, 0.02, 1e-3};
        const auto ref = synth_trace(sc, 1);
        bool same = true;
        for (unsigned w : {2u, 4u, 7u}) {
            const auto t = synth_trace(sc, w);
            same = same && t.samples.size() == ref.samples.size() &&
                   std::memcmp(t.samples.data(), ref.samples.data(), ref.samples.size() * sizeof(double)) == 0;
        }
        const auto again = synth_trace(sc, 1);
        same = same && again.samples == ref.samples && again.scenario_digest == ref.scenario_digest;
        c.check(same, "traces bit-identical for workers {1,2,4,7} and across repeated runs");
    }

    // Parseval with a rectangular window
    {
        Scenario sc = with_signal_power(default_scenario(), 1e-9);
        sc.duration_s = 0.02;
        const auto tr = synth_trace(sc, 1);
        const auto psd = spectral::psd_estimate(tr, sc.cfg.rbw_hz, 0, spectral::Window::Rect, 1.0);
        double integral = 0.0;
        for (double d : psd.density_w_per_hz) integral += d * psd.bin_width_hz;
        const std::size_t used = psd.n_averages * static_cast<std::size_t>(std::llround(sc.sample_rate_hz / 1000.0));
        double ms = 0.0;
        for (std::size_t i = 0; i < used; ++i) ms += tr.samples[i] * tr.samples[i];
        ms /= static_cast<double>(used);
        const double err = std::abs(integral / ms - 1.0);
        c.check(err < 0.005, "Parseval closure (rect window): relative error " + num(err * 100.0, 6) + " %");
    }
    return c;
}

Criterion fig5() {
    Criterion c{6, "fig5 fringes: cos^2 envelope, 3.01 +-0.2 dB peak spacing, null depth >= 30 dB", {}};
    c.absorb(reproduce_fig5({100, 1, 0}).summary);
    return c;
}

} // namespace

int main() {
    const std::vector<std::function<Criterion()>> suite{nf_matrix, table2, fig6, locked, properties, fig5};
    int failed = 0;
    for (const auto& run : suite) {
        Criterion c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.check(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << '\n';
        for (const auto& d : c.details) std::cout << "    " << d << '\n';
        std::cout.flush();
        if (!c.pass) ++failed;
    }
    std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAIL") << '\n';
    return failed == 0 ? 0 : 1;
}
