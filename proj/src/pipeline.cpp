#include "hetnoise/pipeline.hpp"

#include "hetnoise/parallel.hpp"
#include "hetnoise/rng.hpp"
#include "hetnoise/scenario_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hetnoise::pipeline {

namespace {

double to_db(double x) { return 10.0 * std::log10(x); }

double photon_energy(double lambda_m) { return constants::planck * constants::speed_of_light / lambda_m; }

double analyzer_duration(std::size_t samples, double fs) {
    return static_cast<double>(samples) / fs;
}

} // namespace

double calibrate_gain(double target_dbm_per_hz, double lo_power_w, const DetectorConfig& cfg, NoiseHypothesis hyp) {
    const double e_l = std::sqrt(analytic::photon_flux(lo_power_w, cfg.wavelength_m));
    const double c = hyp == NoiseHypothesis::StandardImageVacuum ? 0.0 : -1.0;
    const double density = analytic::correlation_noise_power(e_l, c, cfg);
    return spectral::dbm_to_watts(target_dbm_per_hz) / density;
}

Scenario with_lo_power(Scenario sc, double lo_power_w) {
    const double e_l = std::sqrt(analytic::photon_flux(lo_power_w, sc.cfg.wavelength_m));
    std::visit([&](auto& lo) { lo.e_l = e_l; }, sc.lo);
    return sc;
}

Scenario with_signal_power(Scenario sc, double p_s_w) {
    sc.sig.alpha_s = std::sqrt(analytic::photon_flux(p_s_w, sc.cfg.wavelength_m));
    if (p_s_w > 0.0 && std::holds_alternative<Vacuum>(sc.sig.state)) sc.sig.state = Coherent{};
    return sc;
}

double signal_power_w(const Scenario& sc) {
    return sc.sig.alpha_s * sc.sig.alpha_s * photon_energy(sc.cfg.wavelength_m);
}

double analytic_snr_out_db(const Scenario& sc, const spectral::SegmentPlan& plan) {
    analytic::PowerPair pp;
    if (const auto* b = std::get_if<BichromaticLo>(&sc.lo))
        pp = analytic::blo_powers(sc.sig, *b, sc.phases, sc.hyp, sc.cfg);
    else
        pp = analytic::mono_heterodyne_powers(sc.sig, std::get<MonoLo>(sc.lo), sc.phases, sc.cfg);
    pp.p_n_w_per_hz += sc.dark_density_a2_per_hz;
    return analytic::snr_output_db(pp, plan.rbw_hz);
}

NfMeasurement measure_nf(const Scenario& sc, std::size_t n_seeds, const NfOptions& opts) {
    sc.validate();
    if (n_seeds == 0 || opts.n_windows == 0) throw config_error("nf: need at least one seed and one window");
    const auto plan = spectral::plan_segments(sc.sample_rate_hz, sc.cfg.rbw_hz, opts.window);
    const double duration = analyzer_duration(opts.n_windows * plan.length, sc.sample_rate_hz);
    const double f_beat = sc.beat_hz();
    const double tone_bw = opts.tone_bandwidth_rbw * plan.rbw_hz;

    NfMeasurement m;
    m.rbw_hz = plan.rbw_hz;
    m.per_seed.resize(n_seeds);

    parallel_for(n_seeds, opts.workers, [&](std::size_t i) {
        Scenario s = sc;
        s.seed = sc.seed + i;
        s.duration_s = duration;
        if (std::holds_alternative<Averaged>(s.phases.mode)) {
            // one full sweep of the relative phase from a random start
            auto eng = rng::substream(s.seed, rng::Stream::Phase, 1);
            const double start = std::uniform_real_distribution<double>(0.0, constants::two_pi)(eng);
            if (s.is_bichromatic())
                s.phases.phi_s = 0.5 * (s.phases.phi_1 + s.phases.phi_2) + start;
            else
                s.phases.phi_0 = 0.5 * (s.phases.phi_s + s.phases.phi_i) + start;
            s.phases.mode = Scanned{constants::two_pi / duration, 0.0, 1e-3};
        }
        const auto trace = synth_trace(s, 1);
        const auto windows = spectral::consecutive_periodograms(trace, s.cfg.rbw_hz, opts.window, s.cfg.gain);

        double tone = 0.0, floor = 0.0;
        for (const auto& pg : windows) {
            const double fl = spectral::floor_density(pg, f_beat, opts.floor_halfspan_hz, opts.floor_exclusion_hz);
            tone += spectral::band_power_w(pg, f_beat, tone_bw) - fl * tone_bw;
            floor += fl;
        }
        const double nw = static_cast<double>(windows.size());
        SeedMeasurement& out = m.per_seed[i];
        out.seed = s.seed;
        out.tone_w = tone / nw;
        out.floor_w_per_hz = floor / nw;
        out.snr_out_db = to_db(out.tone_w / (out.floor_w_per_hz * plan.rbw_hz));
    });

    for (const auto& s : m.per_seed) {
        m.tone_w += s.tone_w;
        m.floor_w_per_hz += s.floor_w_per_hz;
    }
    m.tone_w /= static_cast<double>(n_seeds);
    m.floor_w_per_hz /= static_cast<double>(n_seeds);

    // noise in the tone marker fluctuates with ~1/sqrt(bins * averages)
    const double bins_in_tone = tone_bw / plan.bin_width_hz;
    const double averages = static_cast<double>(opts.n_windows * n_seeds);
    const double noise_in_band = m.floor_w_per_hz * tone_bw;
    const double sigma = noise_in_band / std::sqrt(bins_in_tone * averages);
    if (!(m.tone_w > 3.0 * sigma)) {
        const double need = std::pow(3.0 * noise_in_band / std::max(m.tone_w, 1e-300), 2) / bins_in_tone;
        std::ostringstream os;
        os << "nf: tone at " << f_beat << " Hz is not resolvable above the floor with " << averages
           << " window averages; roughly " << std::setprecision(3) << need << " are required";
        throw resolution_error(os.str(), need);
    }

    NoiseFigureReport& r = m.report;
    r.p_s_w = signal_power_w(sc);
    r.snr_in_db = analytic::snr_input_db(r.p_s_w, sc.cfg);
    if (opts.p_s_err_w > 0.0) {
        r.snr_in_err_plus_db = to_db((r.p_s_w + opts.p_s_err_w) / r.p_s_w);
        r.snr_in_err_minus_db = opts.p_s_err_w < r.p_s_w ? to_db(r.p_s_w / (r.p_s_w - opts.p_s_err_w))
                                                         : std::numeric_limits<double>::infinity();
    }
    r.snr_out_db = to_db(m.tone_w / (m.floor_w_per_hz * plan.rbw_hz));

    double mean = 0.0, sq = 0.0;
    std::size_t finite = 0;
    for (const auto& s : m.per_seed) {
        if (!std::isfinite(s.snr_out_db)) continue;
        mean += s.snr_out_db;
        ++finite;
    }
    if (finite > 1) {
        mean /= static_cast<double>(finite);
        for (const auto& s : m.per_seed)
            if (std::isfinite(s.snr_out_db)) sq += (s.snr_out_db - mean) * (s.snr_out_db - mean);
        r.snr_out_err_db = std::sqrt(sq / static_cast<double>(finite - 1)) / std::sqrt(static_cast<double>(finite));
    }

    r.nf_db = analytic::noise_figure(r.snr_in_db, r.snr_out_db);
    r.nf_err_plus_db = std::hypot(r.snr_in_err_plus_db, r.snr_out_err_db);
    r.nf_err_minus_db = std::hypot(r.snr_in_err_minus_db, r.snr_out_err_db);
    r.hypothesis = sc.hyp;
    r.phase_mode = phase_mode_name(sc.phases.mode);
    r.scenario_digest = scenario_digest(sc);
    for (const auto& s : m.per_seed) r.seeds.push_back(s.seed);

    m.analytic_snr_out_db = analytic_snr_out_db(sc, plan);
    return m;
}

DoublingResult doubling_check(const Scenario& base, double lo_power_w, NoiseHypothesis hyp, std::size_t n_seeds,
                              std::size_t n_averages, double factor, bool paired, unsigned workers) {
    if (!(lo_power_w > 0.0)) throw config_error("lo_power: must be positive");
    if (n_seeds == 0) throw config_error("doubling: need at least one seed");
    Scenario blocked = with_signal_power(base, 0.0);
    blocked.hyp = hyp;
    blocked.phases.mode = Averaged{};
    const auto plan = spectral::plan_segments(blocked.sample_rate_hz, blocked.cfg.rbw_hz, spectral::Window::Hann);
    blocked.duration_s = analyzer_duration(spectral::required_samples(plan, n_averages), blocked.sample_rate_hz);
    const double f_beat = blocked.beat_hz();

    std::vector<double> floors(2 * n_seeds);
    parallel_for(2 * n_seeds, workers, [&](std::size_t job) {
        const bool high = job >= n_seeds;
        const std::size_t i = job % n_seeds;
        Scenario s = with_lo_power(blocked, high ? factor * lo_power_w : lo_power_w);
        s.seed = base.seed + i + (high && !paired ? n_seeds : 0);
        const auto psd = spectral::psd_estimate(synth_trace(s, 1), s.cfg.rbw_hz, n_averages, spectral::Window::Hann,
                                                s.cfg.gain);
        floors[job] = spectral::floor_density(psd, f_beat, 100e3, 0.0);
    });

    DoublingResult r;
    for (std::size_t i = 0; i < n_seeds; ++i) {
        r.floor_low_w_per_hz += floors[i];
        r.floor_high_w_per_hz += floors[n_seeds + i];
    }
    r.floor_low_w_per_hz /= static_cast<double>(n_seeds);
    r.floor_high_w_per_hz /= static_cast<double>(n_seeds);
    r.delta_db = to_db(r.floor_high_w_per_hz / r.floor_low_w_per_hz);
    return r;
}

BandCheck check_band(std::string name, double value, double nominal, double err_plus, double err_minus) {
    BandCheck c{std::move(name), value, nominal, err_plus, err_minus, false};
    // band edges are inclusive up to rounding of nominal +- err
    const double tol = 1e-9 * std::max(1.0, std::abs(nominal));
    c.pass = value >= nominal - err_minus - tol && value <= nominal + err_plus + tol;
    return c;
}

bool ExperimentResult::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BandCheck& c) { return c.pass; });
}

Scenario default_scenario() { return ScenarioParams{}.build(); }

namespace {

struct TableRow {
    double p_s_nw;
    double snr_in;
    double nf, nf_plus, nf_minus;
};

// Bench values per signal power: nominal SNR_in and NF with asymmetric error bars.
constexpr TableRow kTable2[] = {
    {0.5, 62.7, -0.8, 1.2, 1.7},
    {1.0, 65.7, -0.8, 0.7, 0.6},
    {2.0, 68.8, -1.0, 0.5, 0.4},
};

std::string fmt(double v, int prec = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

} // namespace

ExperimentResult reproduce_table2(const ReproduceOptions& opts) {
    ExperimentResult res;
    res.name = "table2";
    Scenario base = default_scenario();
    base.seed = opts.seed;
    res.gain = base.cfg.gain;

    NfOptions nfo;
    nfo.workers = opts.workers;
    nfo.p_s_err_w = 0.1e-9;
    for (const auto& row : kTable2) {
        const Scenario sc = with_signal_power(base, row.p_s_nw * 1e-9);
        const auto m = measure_nf(sc, opts.n_seeds, nfo);
        res.rows.push_back(m.report);
        res.oracle_delta_db.push_back(m.report.snr_out_db - m.analytic_snr_out_db);
        const std::string tag = "P_s=" + fmt(row.p_s_nw, 1) + "nW ";
        res.checks.push_back(check_band(tag + "SNR_in (dB)", m.report.snr_in_db, row.snr_in, 0.2, 0.2));
        res.checks.push_back(check_band(tag + "NF (dB)", m.report.nf_db, row.nf, row.nf_plus, row.nf_minus));
    }
    return res;
}

ExperimentResult reproduce_locked(const ReproduceOptions& opts) {
    ExperimentResult res;
    res.name = "locked";
    Scenario sc = with_signal_power(default_scenario(), 0.5e-9);
    sc.seed = opts.seed;
    sc.phases.mode = Locked{0};
    res.gain = sc.cfg.gain;

    NfOptions nfo;
    nfo.workers = opts.workers;
    nfo.p_s_err_w = 0.1e-9;
    const auto m = measure_nf(sc, opts.n_seeds, nfo);
    res.rows.push_back(m.report);
    res.oracle_delta_db.push_back(m.report.snr_out_db - m.analytic_snr_out_db);
    res.checks.push_back(check_band("SNR_out locked (dB)", m.report.snr_out_db, 66.2, 0.5, 0.5));
    res.checks.push_back(check_band("NF locked vs measurement (dB)", m.report.nf_db, -3.5, 0.9, 1.2));
    res.checks.push_back(check_band("NF locked vs -10log10(2) (dB)", m.report.nf_db, -to_db(2.0), 0.3, 0.3));
    return res;
}

Fig5Result reproduce_fig5(const ReproduceOptions& opts, double jitter_rms, std::size_t n_windows) {
    Fig5Result res;
    res.summary.name = "fig5";
    Scenario base = default_scenario();
    base.seed = opts.seed;
    res.summary.gain = base.cfg.gain;
    const auto plan = spectral::plan_segments(base.sample_rate_hz, base.cfg.rbw_hz, spectral::Window::Hann);
    const double duration = analyzer_duration(n_windows * plan.length, base.sample_rate_hz);
    const double rate = constants::two_pi / duration;
    const double tone_bw = 4.0 * plan.rbw_hz;

    for (double p_nw : {0.5, 1.0, 2.0}) {
        Scenario sc = with_signal_power(base, p_nw * 1e-9);
        sc.duration_s = duration;
        // window k is centered on phi' = 2 pi k / n_windows
        sc.phases.phi_s = 0.5 * (sc.phases.phi_1 + sc.phases.phi_2) - rate * 0.5 * plan.length / sc.sample_rate_hz;
        sc.phases.mode = Scanned{rate, jitter_rms, 1e-3};
        const auto scan = phase_scan_trace(sc, opts.workers, plan.length / 2);
        const auto windows = spectral::consecutive_periodograms(scan.trace, sc.cfg.rbw_hz, spectral::Window::Hann,
                                                                sc.cfg.gain);
        FringeCurve c;
        c.p_s_w = p_nw * 1e-9;
        for (std::size_t k = 0; k < windows.size(); ++k) {
            c.phase_rad.push_back(scan.record.phase_rad.at(2 * k + 1));
            c.power_dbm.push_back(spectral::band_power_dbm(windows[k], sc.beat_hz(), tone_bw));
        }
        c.peak_dbm = *std::max_element(c.power_dbm.begin(), c.power_dbm.end());
        c.null_dbm = *std::min_element(c.power_dbm.begin(), c.power_dbm.end());
        res.curves.push_back(std::move(c));
    }

    auto& checks = res.summary.checks;
    for (std::size_t i = 1; i < res.curves.size(); ++i) {
        checks.push_back(check_band("peak spacing " + fmt(res.curves[i - 1].p_s_w * 1e9, 1) + "->" +
                                        fmt(res.curves[i].p_s_w * 1e9, 1) + " nW (dB)",
                                    res.curves[i].peak_dbm - res.curves[i - 1].peak_dbm, to_db(2.0), 0.2, 0.2));
    }
    for (const auto& c : res.curves) {
        const std::string tag = fmt(c.p_s_w * 1e9, 1) + " nW ";
        checks.push_back(check_band(tag + "null depth (dB)", c.peak_dbm - c.null_dbm, 30.0,
                                    std::numeric_limits<double>::infinity(), 0.0));
        // shape: normalized fringe power against cos^2 of the true phase
        const double peak_w = spectral::dbm_to_watts(c.peak_dbm);
        double sq = 0.0;
        for (std::size_t k = 0; k < c.power_dbm.size(); ++k) {
            const double d = spectral::dbm_to_watts(c.power_dbm[k]) / peak_w - std::pow(std::cos(c.phase_rad[k]), 2);
            sq += d * d;
        }
        checks.push_back(check_band(tag + "rms deviation from cos^2", std::sqrt(sq / c.power_dbm.size()), 0.0,
                                    jitter_rms > 0.0 ? 1.0 : 0.02, 0.0));
    }
    return res;
}

Fig6Result reproduce_fig6(const ReproduceOptions& opts) {
    Fig6Result res;
    res.summary.name = "fig6";
    Scenario base = default_scenario();
    base.seed = opts.seed;
    base.cfg.gain = calibrate_gain(-139.0, 1.0e-3, base.cfg, NoiseHypothesis::VacuumCancellation);
    res.summary.gain = base.cfg.gain;
    res.summary.target_floor_dbm_per_hz = -139.0;
    res.beat_hz = base.beat_hz();

    constexpr std::size_t kAverages = 200;
    const std::size_t doubling_seeds = std::clamp<std::size_t>(opts.n_seeds / 25, 2, 8);
    const auto dbl = doubling_check(base, 1.0e-3, NoiseHypothesis::VacuumCancellation, doubling_seeds, kAverages, 2.0,
                                    false, opts.workers);
    res.summary.doubling_delta_db = dbl.delta_db;

    const auto plan = spectral::plan_segments(base.sample_rate_hz, base.cfg.rbw_hz, spectral::Window::Hann);
    const double duration = analyzer_duration(spectral::required_samples(plan, kAverages), base.sample_rate_hz);
    auto psd_of = [&](Scenario s, std::uint64_t seed) {
        s.duration_s = duration;
        s.seed = seed;
        return spectral::psd_estimate(synth_trace(s, opts.workers), s.cfg.rbw_hz, kAverages, spectral::Window::Hann,
                                      s.cfg.gain);
    };
    const Scenario blocked = with_signal_power(base, 0.0);
    // curve seeds are disjoint from the doubling-check seeds
    const std::uint64_t curve_seed = opts.seed + 1000;
    res.blocked_1mw = psd_of(with_lo_power(blocked, 1.0e-3), curve_seed);
    res.blocked_2mw = psd_of(with_lo_power(blocked, 2.0e-3), curve_seed + 1);
    res.beatnote_1mw = psd_of(with_signal_power(with_lo_power(base, 1.0e-3), 0.5e-9), curve_seed + 2);

    const double f = res.beat_hz;
    const double fl_1 = spectral::floor_density(res.blocked_1mw, f, 100e3, 0.0);
    const double fl_beat = spectral::floor_density(res.beatnote_1mw, f, 100e3, 10e3);
    const auto analytic_2mw = spectral::density_dbm_per_hz(
        base.cfg.gain * analytic::correlation_noise_power(std::sqrt(analytic::photon_flux(2.0e-3, base.cfg.wavelength_m)),
                                                          -1.0, base.cfg));

    auto& checks = res.summary.checks;
    checks.push_back(check_band("floor 1.0 mW MC vs measured (dBm/Hz)", spectral::density_dbm_per_hz(dbl.floor_low_w_per_hz),
                                -138.7, 0.4, 0.5));
    checks.push_back(check_band("floor 2.0 mW analytic (dBm/Hz)", analytic_2mw, -135.8, 0.4, 0.5));
    checks.push_back(check_band("floor 2.0 mW MC (dBm/Hz)", spectral::density_dbm_per_hz(dbl.floor_high_w_per_hz),
                                -135.8, 0.4, 0.5));
    checks.push_back(check_band("floor 2.0 mW MC in 1 kHz (dBm)",
                                spectral::watts_to_dbm(dbl.floor_high_w_per_hz * plan.rbw_hz), -105.8, 0.4, 0.5));
    checks.push_back(check_band("LO doubling delta vs 10log10(2) (dB)", dbl.delta_db, to_db(2.0), 0.1, 0.1));
    checks.push_back(check_band("LO doubling delta vs measured (dB)", dbl.delta_db, 2.9, 0.5, 0.6));
    checks.push_back(check_band("beatnote floor - blocked floor (dB)", to_db(fl_beat / fl_1), 0.0, 0.3, 0.3));
    return res;
}

std::string format_report_table(const ExperimentResult& r) {
    std::ostringstream os;
    os << "experiment: " << r.name << "   gain: " << std::setprecision(10) << r.gain << '\n';
    if (!r.rows.empty()) {
        os << std::left << std::setw(10) << "P_s(nW)" << std::setw(16) << "SNR_in(dB)" << std::setw(16)
           << "SNR_out(dB)" << std::setw(20) << "NF(dB)" << std::setw(12) << "MC-oracle" << std::setw(10)
           << "hyp" << "phase\n";
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const auto& row = r.rows[i];
            os << std::left << std::setw(10) << fmt(row.p_s_w * 1e9, 2) << std::setw(16)
               << (fmt(row.snr_in_db) + " +" + fmt(row.snr_in_err_plus_db, 1) + "/-" + fmt(row.snr_in_err_minus_db, 1))
               << std::setw(16) << (fmt(row.snr_out_db) + " +-" + fmt(row.snr_out_err_db))
               << std::setw(20) << (fmt(row.nf_db) + " +" + fmt(row.nf_err_plus_db) + "/-" + fmt(row.nf_err_minus_db))
               << std::setw(12) << (i < r.oracle_delta_db.size() ? fmt(r.oracle_delta_db[i], 3) : "")
               << std::setw(10) << hypothesis_name(row.hypothesis) << row.phase_mode << '\n';
        }
    }
    if (r.doubling_delta_db) os << "LO doubling delta: " << fmt(*r.doubling_delta_db, 3) << " dB\n";
    for (const auto& c : r.checks) {
        os << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(44) << c.name << " value " << std::setw(10)
           << fmt(c.value, 3) << " band [" << fmt(c.nominal - c.err_minus, 3) << ", "
           << (std::isinf(c.err_plus) ? std::string("inf") : fmt(c.nominal + c.err_plus, 3)) << "]\n";
    }
    return os.str();
}

std::string to_json(const ExperimentResult& r, const std::vector<std::string>& header) {
    using nlohmann::json;
    json j;
    j["experiment"] = r.name;
    j["header"] = header;
    j["gain"] = r.gain;
    if (r.target_floor_dbm_per_hz != 0.0) j["target_floor_dbm_per_hz"] = r.target_floor_dbm_per_hz;
    if (r.doubling_delta_db) j["doubling_delta_db"] = *r.doubling_delta_db;
    j["rows"] = json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        j["rows"].push_back({{"p_s_w", row.p_s_w},
                             {"snr_in_db", row.snr_in_db},
                             {"snr_in_err_plus_db", row.snr_in_err_plus_db},
                             {"snr_in_err_minus_db", row.snr_in_err_minus_db},
                             {"snr_out_db", row.snr_out_db},
                             {"snr_out_err_db", row.snr_out_err_db},
                             {"nf_db", row.nf_db},
                             {"nf_err_plus_db", row.nf_err_plus_db},
                             {"nf_err_minus_db", row.nf_err_minus_db},
                             {"hypothesis", hypothesis_name(row.hypothesis)},
                             {"phase_mode", row.phase_mode},
                             {"scenario_digest", row.scenario_digest},
                             {"seeds", row.seeds},
                             {"oracle_delta_db", i < r.oracle_delta_db.size() ? r.oracle_delta_db[i] : 0.0}});
    }
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"value", c.value},
                               {"nominal", c.nominal},
                               {"err_plus", std::isinf(c.err_plus) ? json(nullptr) : json(c.err_plus)},
                               {"err_minus", c.err_minus},
                               {"pass", c.pass}});
    }
    j["all_pass"] = r.all_pass();
    return j.dump(2);
}

void write_fig5_csv(std::ostream& os, const Fig5Result& r, const std::vector<std::string>& header) {
    for (const auto& h : header) os << "# " << h << '\n';
    os << "p_s_nw,phase_rad,power_dbm\n";
    os << std::setprecision(10);
    for (const auto& c : r.curves)
        for (std::size_t k = 0; k < c.power_dbm.size(); ++k)
            os << c.p_s_w * 1e9 << ',' << c.phase_rad[k] << ',' << c.power_dbm[k] << '\n';
}

void write_fig6_csv(std::ostream& os, const Fig6Result& r, const std::vector<std::string>& header,
                    double halfspan_hz) {
    for (const auto& h : header) os << "# " << h << '\n';
    os << "# rbw_hz=" << r.blocked_1mw.rbw_hz << "\n# n_averages=" << r.blocked_1mw.n_averages << '\n';
    os << "freq_hz,blocked_1mw_dbm_per_hz,blocked_2mw_dbm_per_hz,beatnote_1mw_dbm_per_hz\n";
    os << std::setprecision(10);
    const auto& f = r.blocked_1mw.freq_bins_hz;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (std::abs(f[k] - r.beat_hz) > halfspan_hz) continue;
        os << f[k] << ',' << spectral::density_dbm_per_hz(r.blocked_1mw.density_w_per_hz[k]) << ','
           << spectral::density_dbm_per_hz(r.blocked_2mw.density_w_per_hz[k]) << ','
           << spectral::density_dbm_per_hz(r.beatnote_1mw.density_w_per_hz[k]) << '\n';
    }
}

} // namespace hetnoise::pipeline
