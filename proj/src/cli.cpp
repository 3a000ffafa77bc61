#include "hetnoise/cli.hpp"

#include "hetnoise/analytic.hpp"
#include "hetnoise/pipeline.hpp"
#include "hetnoise/scenario_io.hpp"
#include "hetnoise/spectral.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace hetnoise::cli {

namespace fs = std::filesystem;

std::string flag_for_key(const std::string& key) {
    std::string f = "--" + key;
    for (char& c : f)
        if (c == '_') c = '-';
    return f;
}

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

// Options shared by every subcommand.
struct Common {
    std::string scenario_file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> key_values; // raw storage for per-key flags
    std::map<const CLI::Option*, std::string> option_key;
    std::set<const CLI::Option*> set_opts;
    std::string out_dir;
    std::string dump_scenario;
    unsigned workers = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--scenario", c.scenario_file, "scenario file (key = value lines)")->check(CLI::ExistingFile);
    auto* set_opt = sub->add_option("--set", c.sets, "override a scenario key: key=value")->allow_extra_args(false);
    c.set_opts.insert(set_opt);
    for (const auto& k : scenario_keys()) {
        std::string names = flag_for_key(k.name);
        if (k.name == "phase_mode") names += ",--phase";
        // the flag's own storage is unused; values are replayed in parse order
        auto* opt = sub->add_option(names)->description(k.doc + " [default " + k.default_value + "]");
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)->allow_extra_args(false);
        if (k.kind == ValueKind::Choice) opt->check(CLI::IsMember(k.choices));
        c.option_key[opt] = k.name;
    }
    sub->add_option("--out-dir", c.out_dir, std::string("output directory [env ") + kOutDirEnv + ", else .]");
    sub->add_option("--dump-scenario", c.dump_scenario, "write the effective scenario to FILE ('-' for stdout)");
    sub->add_option("--workers", c.workers, "worker threads (0 = hardware concurrency)");
}

// File values first, then flags in the order they appeared (last wins).
ScenarioParams collect_params(const CLI::App* sub, const Common& c) {
    ScenarioParams p;
    if (!c.scenario_file.empty()) p.merge_file(c.scenario_file);
    std::map<const CLI::Option*, std::size_t> seen;
    for (const CLI::Option* opt : sub->parse_order()) {
        const std::size_t i = seen[opt]++;
        if (c.set_opts.contains(opt)) {
            const std::string& kv = c.sets.at(i);
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw config_error("--set: expected key=value, got '" + kv + "'");
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t"));
                s.erase(s.find_last_not_of(" \t") + 1);
                return s;
            };
            p.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        } else if (auto it = c.option_key.find(opt); it != c.option_key.end()) {
            p.set(it->second, opt->results().at(i));
        }
    }
    return p;
}

fs::path out_dir(const Common& c) {
    fs::path d = c.out_dir;
    if (d.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        d = env && *env ? env : ".";
    }
    fs::create_directories(d);
    return d;
}

std::ofstream open_out(const fs::path& p, bool binary = false) {
    std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
    if (!os) throw config_error("out-dir: cannot write " + p.string());
    return os;
}

void maybe_dump(const Common& c, const ScenarioParams& p) {
    if (c.dump_scenario.empty()) return;
    if (c.dump_scenario == "-") {
        std::cout << p.dump();
        return;
    }
    auto os = open_out(c.dump_scenario);
    os << p.dump();
}

void write_header_text(std::ostream& os, const std::vector<std::string>& header) {
    for (const auto& h : header) os << "# " << h << '\n';
}

std::string fixed(double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << std::showpos << v;
    return os.str();
}

// ---------------------------------------------------------------------------

int run_predict(const Common& c) {
    using analytic::DetectorKind;
    struct Row {
        DetectorKind kind;
        PhaseMode mode;
        NoiseHypothesis hyp;
        double expected;
    };
    const double three = 10.0 * std::log10(2.0);
    const std::vector<Row> rows{
        {DetectorKind::Homodyne, Locked{0}, NoiseHypothesis::StandardImageVacuum, 0.0},
        {DetectorKind::MonoHeterodyne, Averaged{}, NoiseHypothesis::StandardImageVacuum, three},
        {DetectorKind::BloHeterodyne, Averaged{}, NoiseHypothesis::StandardImageVacuum, three},
        {DetectorKind::BloHeterodyne, Locked{0}, NoiseHypothesis::StandardImageVacuum, 0.0},
        {DetectorKind::BloHeterodyne, Averaged{}, NoiseHypothesis::VacuumCancellation, 0.0},
        {DetectorKind::BloHeterodyne, Locked{0}, NoiseHypothesis::VacuumCancellation, -three},
    };
    nlohmann::json j;
    j["header"] = std::vector<std::string>{"tool=" + tool_version()};
    j["rows"] = nlohmann::json::array();
    bool ok = true;
    std::cout << std::left << std::setw(18) << "detector" << std::setw(10) << "phase" << std::setw(10) << "hyp"
              << "NF (dB)\n";
    for (const auto& r : rows) {
        const bool homodyne = r.kind == DetectorKind::Homodyne;
        const double nf = analytic::nf_predicted(r.kind, r.mode, r.hyp);
        const bool pass = std::abs(nf - r.expected) < 1e-12;
        ok = ok && pass;
        const std::string hyp = homodyne || r.kind == DetectorKind::MonoHeterodyne ? "-" : hypothesis_name(r.hyp);
        const std::string mode = homodyne ? "-" : phase_mode_name(r.mode);
        std::cout << std::left << std::setw(18) << analytic::detector_kind_name(r.kind) << std::setw(10) << mode
                  << std::setw(10) << hyp << fixed(nf, 4) << (pass ? "" : "  (unexpected)") << '\n';
        j["rows"].push_back({{"detector", analytic::detector_kind_name(r.kind)},
                             {"phase_mode", mode},
                             {"hypothesis", hyp},
                             {"nf_db", nf},
                             {"expected_db", r.expected},
                             {"pass", pass}});
    }
    j["all_pass"] = ok;
    auto os = open_out(out_dir(c) / "predict.json");
    os << j.dump(2) << '\n';
    return ok ? kExitOk : kExitFail;
}

int run_simulate(const Common& c, const ScenarioParams& p, const std::string& format) {
    const Scenario sc = p.build();
    const auto header = artifact_header(sc, p.overridden());
    const PhotocurrentTrace tr = std::holds_alternative<Scanned>(sc.phases.mode)
                                     ? phase_scan_trace(sc, c.workers).trace
                                     : synth_trace(sc, c.workers);
    const fs::path dir = out_dir(c);
    fs::path path;
    if (format == "csv") {
        path = dir / "trace.csv";
        auto os = open_out(path);
        write_trace_csv(os, tr, header);
    } else {
        path = dir / "trace.bin";
        auto os = open_out(path, true);
        write_trace_binary(os, tr, header);
    }
    std::cout << "samples=" << tr.samples.size() << " sample_rate_hz=" << tr.sample_rate_hz
              << " scenario_digest=" << tr.scenario_digest << " seed=" << tr.seed << '\n'
              << "wrote " << path.string() << '\n';
    return kExitOk;
}

int run_psd(const Common& c, const ScenarioParams& p, std::size_t averages, const std::string& window,
            const std::string& trace_file, double span_hz) {
    const Scenario sc = p.build();
    const auto w = spectral::parse_window(window);
    auto header = artifact_header(sc, p.overridden());
    PhotocurrentTrace tr;
    if (!trace_file.empty()) {
        std::ifstream is(trace_file, std::ios::binary);
        if (!is) throw config_error("trace: cannot read " + trace_file);
        tr = read_trace_binary(is);
        header.push_back("trace_digest=" + tr.scenario_digest);
    } else {
        tr = synth_trace(sc, c.workers);
    }
    const auto psd = spectral::psd_estimate(tr, sc.cfg.rbw_hz, averages, w, sc.cfg.gain);
    const double f = sc.beat_hz();
    const double lo = span_hz > 0.0 ? f - span_hz : 0.0;
    const double hi = span_hz > 0.0 ? f + span_hz : 0.0;
    const fs::path dir = out_dir(c);
    {
        auto os = open_out(dir / "psd.csv");
        spectral::write_psd_csv(os, psd, header, lo, hi);
    }
    {
        auto os = open_out(dir / "psd.json");
        spectral::write_psd_json(os, psd, header, lo, hi);
    }
    const double floor = spectral::floor_density(psd, f, 100e3, 10e3);
    const double tone = spectral::band_power_w(psd, f, 4.0 * psd.rbw_hz) - floor * 4.0 * psd.rbw_hz;
    std::cout << "rbw_hz=" << psd.rbw_hz << " n_averages=" << psd.n_averages << " window=" << psd.window_name << '\n'
              << "floor_dbm_per_hz=" << spectral::density_dbm_per_hz(floor) << '\n'
              << "tone_dbm=" << (tone > 0.0 ? spectral::watts_to_dbm(tone) : -INFINITY) << '\n'
              << "wrote " << (dir / "psd.csv").string() << ", " << (dir / "psd.json").string() << '\n';
    return kExitOk;
}

int run_phase_scan(const Common& c, const ScenarioParams& p, std::size_t stride) {
    const Scenario sc = p.build();
    if (!std::holds_alternative<Scanned>(sc.phases.mode))
        throw config_error("phase_mode: phase-scan needs phase_mode = scan");
    const auto header = artifact_header(sc, p.overridden());
    const auto res = phase_scan_trace(sc, c.workers, stride);
    const auto plan = spectral::plan_segments(sc.sample_rate_hz, sc.cfg.rbw_hz, spectral::Window::Hann);
    const fs::path dir = out_dir(c);
    {
        auto os = open_out(dir / "phase_scan_record.csv");
        write_header_text(os, header);
        os << "t_s,phase_rad,beat_amplitude_a\n" << std::setprecision(12);
        for (std::size_t i = 0; i < res.record.t_s.size(); ++i)
            os << res.record.t_s[i] << ',' << res.record.phase_rad[i] << ',' << res.record.beat_amplitude_a[i] << '\n';
    }
    std::size_t n_windows = 0;
    if (res.trace.samples.size() >= plan.length) {
        const auto windows = spectral::consecutive_periodograms(res.trace, sc.cfg.rbw_hz, spectral::Window::Hann,
                                                                sc.cfg.gain);
        n_windows = windows.size();
        auto os = open_out(dir / "phase_scan_fringe.csv");
        write_header_text(os, header);
        os << "t_center_s,power_dbm\n" << std::setprecision(12);
        for (std::size_t k = 0; k < windows.size(); ++k) {
            const double t = (static_cast<double>(k) + 0.5) * static_cast<double>(plan.length) / sc.sample_rate_hz;
            os << t << ',' << spectral::band_power_dbm(windows[k], sc.beat_hz(), 4.0 * plan.rbw_hz) << '\n';
        }
    }
    std::cout << "record_points=" << res.record.t_s.size() << " analyzer_windows=" << n_windows << '\n'
              << "wrote " << (dir / "phase_scan_record.csv").string() << '\n';
    return kExitOk;
}

int run_nf(const Common& c, const ScenarioParams& p, std::size_t seeds, std::size_t windows) {
    const Scenario sc = p.build();
    pipeline::NfOptions opts;
    opts.workers = c.workers;
    opts.n_windows = windows;
    opts.p_s_err_w = p.number("signal_power_err");
    const auto m = pipeline::measure_nf(sc, seeds, opts);
    pipeline::ExperimentResult r;
    r.name = "nf";
    r.gain = sc.cfg.gain;
    r.rows.push_back(m.report);
    r.oracle_delta_db.push_back(m.report.snr_out_db - m.analytic_snr_out_db);
    const auto header = artifact_header(sc, p.overridden());
    std::cout << pipeline::format_report_table(r);
    std::cout << "analytic SNR_out: " << std::fixed << std::setprecision(3) << m.analytic_snr_out_db << " dB\n";
    auto os = open_out(out_dir(c) / "nf.json");
    os << pipeline::to_json(r, header) << '\n';
    return kExitOk;
}

int emit_experiment(const Common& c, const pipeline::ExperimentResult& r, const std::vector<std::string>& header) {
    const fs::path dir = out_dir(c);
    const std::string table = pipeline::format_report_table(r);
    std::cout << table;
    {
        auto os = open_out(dir / (r.name + ".txt"));
        write_header_text(os, header);
        os << table;
    }
    {
        auto os = open_out(dir / (r.name + ".json"));
        os << pipeline::to_json(r, header) << '\n';
    }
    std::cout << (r.all_pass() ? "RESULT PASS" : "RESULT FAIL") << '\n';
    return r.all_pass() ? kExitOk : kExitFail;
}

int run_reproduce(const Common& c, const ScenarioParams& p, const std::string& which, std::size_t seeds,
                  double jitter) {
    pipeline::ReproduceOptions opts;
    opts.n_seeds = seeds;
    opts.seed = static_cast<std::uint64_t>(p.number("seed"));
    opts.workers = c.workers;
    Scenario base = pipeline::default_scenario();
    base.seed = opts.seed;
    const auto header = artifact_header(base, p.overridden());

    if (which == "table2") return emit_experiment(c, pipeline::reproduce_table2(opts), header);
    if (which == "locked") return emit_experiment(c, pipeline::reproduce_locked(opts), header);
    if (which == "fig5") {
        const auto r = pipeline::reproduce_fig5(opts, jitter);
        auto os = open_out(out_dir(c) / "fig5.csv");
        pipeline::write_fig5_csv(os, r, header);
        return emit_experiment(c, r.summary, header);
    }
    const auto r = pipeline::reproduce_fig6(opts);
    auto os = open_out(out_dir(c) / "fig6.csv");
    pipeline::write_fig6_csv(os, r, header);
    return emit_experiment(c, r.summary, header);
}

int run_calibrate(const Common& c, const ScenarioParams& p, double target) {
    const Scenario sc = p.build();
    const double lo_power = p.number("lo_power");
    const double g = pipeline::calibrate_gain(target, lo_power, sc.cfg, sc.hyp);
    std::cout << std::setprecision(17) << "gain=" << g << '\n';
    nlohmann::json j;
    j["header"] = artifact_header(sc, p.overridden());
    j["target_dbm_per_hz"] = target;
    j["lo_power_w"] = lo_power;
    j["hypothesis"] = hypothesis_name(sc.hyp);
    j["gain"] = g;
    auto os = open_out(out_dir(c) / "calibrate.json");
    os << j.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int dispatch(int argc, char** argv) {
    CLI::App app{"Heterodyne and homodyne shot-noise simulator"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1, 1);

    Common common;
    std::string sim_format = "bin";
    std::size_t psd_averages = 0;
    std::string psd_window = "hann";
    std::string psd_trace;
    std::string psd_span = "0";
    std::size_t scan_stride = 1024;
    std::size_t nf_seeds = 100, nf_windows = 16;
    std::string which;
    std::size_t rep_seeds = 100;
    double rep_jitter = 0.0;
    double cal_target = -139.0;

    auto* predict = app.add_subcommand("predict", "analytic noise-figure matrix");
    auto* simulate = app.add_subcommand("simulate", "synthesize a photocurrent trace");
    simulate->add_option("--format", sim_format, "trace format")->check(CLI::IsMember({"bin", "csv"}));
    auto* psd = app.add_subcommand("psd", "spectrum-analyzer PSD of a trace");
    psd->add_option("--averages", psd_averages, "periodogram averages (0 = as many as fit)");
    psd->add_option("--window", psd_window, "analyzer window")->check(CLI::IsMember({"hann", "rect"}));
    psd->add_option("--trace", psd_trace, "read a binary trace instead of synthesizing")->check(CLI::ExistingFile);
    psd->add_option("--span", psd_span, "write only +-span Hz around the beat (0 = all)");
    auto* scan = app.add_subcommand("phase-scan", "trace with a swept relative phase");
    scan->add_option("--record-stride", scan_stride, "samples between ground-truth phase records");
    auto* nf = app.add_subcommand("nf", "Monte Carlo noise-figure measurement");
    nf->add_option("--seeds", nf_seeds, "number of seeds");
    nf->add_option("--windows", nf_windows, "analyzer windows per seed");
    auto* reproduce = app.add_subcommand("reproduce", "reproduce a published result");
    reproduce->add_option("experiment", which, "table2 | fig5 | fig6 | locked")
        ->required()
        ->check(CLI::IsMember({"table2", "fig5", "fig6", "locked"}));
    reproduce->add_option("--seeds", rep_seeds, "number of seeds");
    reproduce->add_option("--jitter", rep_jitter, "phase jitter RMS for fig5 (rad)");
    auto* calibrate = app.add_subcommand("calibrate", "gain that puts the LO shot-noise floor at a target");
    calibrate->add_option("--target", cal_target, "target floor (dBm/Hz)");

    for (auto* sub : {predict, simulate, psd, scan, nf, reproduce, calibrate}) add_common(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        const ScenarioParams params = collect_params(sub, common);
        maybe_dump(common, params);
        if (sub == predict) return run_predict(common);
        if (sub == simulate) return run_simulate(common, params, sim_format);
        if (sub == psd) return run_psd(common, params, psd_averages, psd_window, psd_trace,
                                         parse_quantity("span", psd_span, ValueKind::Frequency));
        if (sub == scan) return run_phase_scan(common, params, scan_stride);
        if (sub == nf) return run_nf(common, params, nf_seeds, nf_windows);
        if (sub == reproduce) return run_reproduce(common, params, which, rep_seeds, rep_jitter);
        return run_calibrate(common, params, cal_target);
    } catch (const resolution_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const unsupported_error& e) {
        std::cerr << "error: unsupported: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace hetnoise::cli
