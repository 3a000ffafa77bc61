#include "hetnoise/scenario_io.hpp"

#include "hetnoise/analytic.hpp"
#include "hetnoise/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hetnoise {

std::string tool_version() { return std::string("hetnoise ") + HETNOISE_VERSION; }

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<KeySpec> build_keys() {
    using K = ValueKind;
    return {
        {"signal_power", K::Power, "5e-10", {}, "optical signal power (W); 0 blocks the signal"},
        {"signal_power_err", K::Power, "0", {}, "1-sigma uncertainty of signal_power (W)"},
        {"wavelength", K::Length, "1.064e-06", {}, "optical wavelength (m)"},
        {"state", K::Choice, "coherent", {"coherent", "vacuum", "squeezed"}, "quantum state of the signal"},
        {"squeeze_s", K::Real, "0", {}, "two-mode squeezing parameter s"},
        {"lo_kind", K::Choice, "blo", {"blo", "mono"}, "bichromatic or monochromatic local oscillator"},
        {"lo_power", K::Power, "0.002", {}, "total LO optical power (W)"},
        {"beat_frequency", K::Frequency, "1300000", {}, "heterodyne frequency Omega/2pi (Hz)"},
        {"phi_s", K::Angle, "0", {}, "signal phase (rad)"},
        {"phi_0", K::Angle, "0", {}, "mono LO phase (rad)"},
        {"phi_i", K::Angle, "0", {}, "image phase, i1 for a BLO (rad)"},
        {"phi_i2", K::Angle, "0", {}, "second image phase (rad)"},
        {"phi_1", K::Angle, "0", {}, "upper BLO tone phase (rad)"},
        {"phi_2", K::Angle, "0", {}, "lower BLO tone phase (rad)"},
        {"phase_mode", K::Choice, "averaged", {"averaged", "locked", "scan"}, "relative phase handling"},
        {"lock_k", K::Integer, "0", {}, "locked phase is k*pi"},
        {"scan_rate", K::AngularRate, "100", {}, "phase scan rate (rad/s)"},
        {"jitter_rms", K::Angle, "0", {}, "RMS phase jitter during a scan (rad)"},
        {"jitter_tau", K::Time, "0.001", {}, "correlation time of the jitter (s)"},
        {"hypothesis", K::Choice, "cancel", {"standard", "cancel"}, "image-vacuum noise hypothesis"},
        {"eta", K::Real, "0.7", {}, "quantum efficiency"},
        {"gain", K::Real, fmt_double(kCalibratedGain), {}, "electronic power gain"},
        {"rbw", K::Frequency, "1000", {}, "resolution bandwidth (Hz)"},
        {"t_meas", K::Time, "0", {}, "measurement time (s); 0 means 1/rbw"},
        {"duration", K::Time, "0.016", {}, "trace duration (s)"},
        {"sample_rate", K::Frequency, "0", {}, "sample rate (Hz); 0 means 16 x beat_frequency"},
        {"seed", K::Seed, "1", {}, "random seed"},
        {"cyclostationary", K::Flag, "false", {}, "modulate the noise at 2*Omega"},
        {"dark_density", K::Density, "0", {}, "additive dark-noise density, pre-gain (W/Hz)"},
    };
}

const KeySpec& find_key(const std::string& key) {
    const auto& keys = scenario_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
    if (it == keys.end()) throw config_error("unknown scenario key '" + key + "'");
    return *it;
}

double prefix_multiplier(const std::string& key, const std::string& prefix) {
    if (prefix.empty()) return 1.0;
    if (prefix.size() == 1) {
        switch (prefix[0]) {
        case 'p': return 1e-12;
        case 'n': return 1e-9;
        case 'u': return 1e-6;
        case 'm': return 1e-3;
        case 'k': return 1e3;
        case 'M': return 1e6;
        case 'G': return 1e9;
        default: break;
        }
    }
    throw config_error(key + ": unknown unit prefix '" + prefix + "'");
}

std::vector<std::string> base_units(ValueKind kind) {
    switch (kind) {
    case ValueKind::Power: return {"W"};
    case ValueKind::Length: return {"m"};
    case ValueKind::Frequency: return {"Hz"};
    case ValueKind::Time: return {"s"};
    case ValueKind::Angle: return {"rad"};
    case ValueKind::AngularRate: return {"rad/s"};
    case ValueKind::Density: return {"W/Hz", "A2/Hz"};
    default: return {};
    }
}

std::string canonical_value(const KeySpec& spec, const std::string& raw) {
    const std::string text = trim(raw);
    switch (spec.kind) {
    case ValueKind::Choice: {
        std::string v = lower(text);
        if (v == "cancellation") v = "cancel";
        if (v == "scanned") v = "scan";
        if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
            std::string all;
            for (const auto& c : spec.choices) all += (all.empty() ? "" : "|") + c;
            throw config_error(spec.name + ": expected one of {" + all + "}, got '" + text + "'");
        }
        return v;
    }
    case ValueKind::Flag: {
        const std::string v = lower(text);
        if (v == "1" || v == "true" || v == "yes" || v == "on") return "true";
        if (v == "0" || v == "false" || v == "no" || v == "off") return "false";
        throw config_error(spec.name + ": expected a boolean, got '" + text + "'");
    }
    case ValueKind::Integer: {
        long long v = 0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw config_error(spec.name + ": expected an integer, got '" + text + "'");
        return std::to_string(v);
    }
    case ValueKind::Seed: {
        unsigned long long v = 0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw config_error(spec.name + ": expected an unsigned 64-bit integer, got '" + text + "'");
        return std::to_string(v);
    }
    default: return fmt_double(parse_quantity(spec.name, text, spec.kind));
    }
}

PhaseMode phase_mode_from(const ScenarioParams& p) {
    const std::string& m = p.get("phase_mode");
    if (m == "locked") return Locked{static_cast<int>(std::stoll(p.get("lock_k")))};
    if (m == "scan") return Scanned{p.number("scan_rate"), p.number("jitter_rms"), p.number("jitter_tau")};
    return Averaged{};
}

} // namespace

const std::vector<KeySpec>& scenario_keys() {
    static const std::vector<KeySpec> keys = build_keys();
    return keys;
}

double parse_quantity(const std::string& key, const std::string& text_in, ValueKind kind) {
    const std::string text = trim(text_in);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || !std::isfinite(value)) throw config_error(key + ": expected a number, got '" + text + "'");
    const std::string suffix = trim(std::string(ptr, text.data() + text.size()));
    if (suffix.empty()) return value;

    if (kind == ValueKind::Angle) {
        if (suffix == "deg") return value * constants::pi / 180.0;
        if (suffix == "pi") return value * constants::pi;
    }
    for (const auto& base : base_units(kind)) {
        if (suffix.size() >= base.size() && suffix.compare(suffix.size() - base.size(), base.size(), base) == 0)
            return value * prefix_multiplier(key, suffix.substr(0, suffix.size() - base.size()));
    }
    throw config_error(key + ": unit '" + suffix + "' does not fit this key");
}

ScenarioParams::ScenarioParams() {
    for (const auto& k : scenario_keys()) values_[k.name] = canonical_value(k, k.default_value);
}

void ScenarioParams::set(const std::string& key, const std::string& value) {
    const KeySpec& spec = find_key(key);
    values_[key] = canonical_value(spec, value);
    std::erase(overridden_, key);
    overridden_.push_back(key);
}

const std::string& ScenarioParams::get(const std::string& key) const {
    find_key(key);
    return values_.at(key);
}

double ScenarioParams::number(const std::string& key) const {
    const std::string& v = get(key);
    double d = 0.0;
    std::from_chars(v.data(), v.data() + v.size(), d);
    return d;
}

void ScenarioParams::merge_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("scenario line " + std::to_string(lineno) + ": expected 'key = value'");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void ScenarioParams::merge_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("scenario: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    merge_text(ss.str());
}

std::string ScenarioParams::dump() const {
    std::ostringstream os;
    for (const auto& k : scenario_keys()) os << k.name << " = " << values_.at(k.name) << '\n';
    return os.str();
}

Scenario ScenarioParams::build() const {
    Scenario sc;
    sc.cfg.eta = number("eta");
    sc.cfg.gain = number("gain");
    sc.cfg.rbw_hz = number("rbw");
    if (number("t_meas") > 0.0) sc.cfg.t_meas_s = number("t_meas");
    sc.cfg.wavelength_m = number("wavelength");
    try {
        sc.cfg.validate();
    } catch (const invariant_error& e) {
        throw config_error(e.what());
    }

    const double lambda = sc.cfg.wavelength_m;
    const double omega_s = constants::two_pi * constants::speed_of_light / lambda;
    const double omega = constants::two_pi * number("beat_frequency");
    if (!(omega > 0.0)) throw config_error("beat_frequency: must be positive");
    if (!(number("signal_power") >= 0.0)) throw config_error("signal_power: must be >= 0");
    if (!(number("lo_power") > 0.0)) throw config_error("lo_power: must be positive");

    StateKind state = Coherent{};
    if (get("state") == "vacuum") state = Vacuum{};
    if (get("state") == "squeezed") state = TwoModeSqueezed{number("squeeze_s")};
    try {
        sc.sig = SignalField::make(omega_s, std::sqrt(analytic::photon_flux(number("signal_power"), lambda)),
                                   number("phi_s"), state);
    } catch (const invariant_error& e) {
        throw config_error(std::string("state: ") + e.what());
    }

    const double e_l = std::sqrt(analytic::photon_flux(number("lo_power"), lambda));
    if (get("lo_kind") == "mono")
        sc.lo = make_mono_lo(omega_s - omega, e_l, number("phi_0"));
    else
        sc.lo = make_bichromatic_lo(omega_s + omega, omega_s - omega, e_l, number("phi_1"), number("phi_2"));
    sc.images = ImageBandSet::for_geometry(sc.sig, sc.lo, number("phi_i"), number("phi_i2"));

    sc.phases.phi_s = number("phi_s");
    sc.phases.phi_0 = number("phi_0");
    sc.phases.phi_i = number("phi_i");
    sc.phases.phi_i2 = number("phi_i2");
    sc.phases.phi_1 = number("phi_1");
    sc.phases.phi_2 = number("phi_2");
    sc.phases.mode = phase_mode_from(*this);

    sc.hyp = get("hypothesis") == "standard" ? NoiseHypothesis::StandardImageVacuum : NoiseHypothesis::VacuumCancellation;
    sc.cyclostationary = get("cyclostationary") == "true";
    sc.duration_s = number("duration");
    sc.sample_rate_hz = number("sample_rate") > 0.0 ? number("sample_rate") : 16.0 * number("beat_frequency");
    sc.seed = std::stoull(get("seed"));
    sc.dark_density_a2_per_hz = number("dark_density");
    sc.validate();
    return sc;
}

std::string canonical_text(const Scenario& sc) {
    std::ostringstream os;
    const auto num = [&](const char* k, double v) { os << k << '=' << fmt_double(v) << '\n'; };
    num("sig.omega_s", sc.sig.omega_s);
    num("sig.alpha_s", sc.sig.alpha_s);
    num("sig.phi_s", sc.sig.phi_s);
    os << "sig.state=" << state_name(sc.sig.state) << '\n';
    if (const auto* sq = std::get_if<TwoModeSqueezed>(&sc.sig.state)) num("sig.s", sq->s);
    if (const auto* m = std::get_if<MonoLo>(&sc.lo)) {
        os << "lo=mono\n";
        num("lo.omega_0", m->omega_0);
        num("lo.e_l", m->e_l);
        num("lo.phi_0", m->phi_0);
    } else {
        const auto& b = std::get<BichromaticLo>(sc.lo);
        os << "lo=blo\n";
        num("lo.omega_1", b.omega_1);
        num("lo.omega_2", b.omega_2);
        num("lo.e_l", b.e_l);
        num("lo.phi_1", b.phi_1);
        num("lo.phi_2", b.phi_2);
    }
    for (const auto& im : sc.images.modes) {
        num("image.omega", im.omega);
        num("image.phi", im.phi);
        os << "image.state=" << state_name(im.state) << '\n';
    }
    num("phases.phi_s", sc.phases.phi_s);
    num("phases.phi_0", sc.phases.phi_0);
    num("phases.phi_i", sc.phases.phi_i);
    num("phases.phi_i2", sc.phases.phi_i2);
    num("phases.phi_1", sc.phases.phi_1);
    num("phases.phi_2", sc.phases.phi_2);
    os << "phases.mode=" << phase_mode_name(sc.phases.mode) << '\n';
    if (const auto* l = std::get_if<Locked>(&sc.phases.mode)) os << "phases.k=" << l->k << '\n';
    if (const auto* s = std::get_if<Scanned>(&sc.phases.mode)) {
        num("phases.rate", s->rate);
        num("phases.jitter_rms", s->jitter_rms);
        num("phases.jitter_tau", s->jitter_tau_s);
    }
    num("cfg.eta", sc.cfg.eta);
    num("cfg.e", sc.cfg.e_charge);
    num("cfg.gain", sc.cfg.gain);
    num("cfg.rbw", sc.cfg.rbw_hz);
    num("cfg.t_meas", sc.cfg.measurement_time());
    num("cfg.wavelength", sc.cfg.wavelength_m);
    os << "hyp=" << hypothesis_name(sc.hyp) << '\n';
    os << "cyclostationary=" << (sc.cyclostationary ? 1 : 0) << '\n';
    num("duration", sc.duration_s);
    num("sample_rate", sc.sample_rate_hz);
    os << "seed=" << sc.seed << '\n';
    num("dark", sc.dark_density_a2_per_hz);
    return os.str();
}

std::string scenario_digest(const Scenario& sc) {
    const std::string text = canonical_text(sc);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("scenario_digest: SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < 8 && i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::vector<std::string> artifact_header(const Scenario& sc, const std::vector<std::string>& overrides) {
    std::vector<std::string> h{"tool=" + tool_version(), "scenario_digest=" + scenario_digest(sc),
                               "seed=" + std::to_string(sc.seed)};
    if (!overrides.empty()) {
        std::string o;
        for (const auto& k : overrides) o += (o.empty() ? "" : ",") + k;
        h.push_back("overrides=" + o);
    }
    return h;
}

void write_trace_binary(std::ostream& os, const PhotocurrentTrace& tr, const std::vector<std::string>& header) {
    os << "HETNOISE-TRACE 1\n";
    for (const auto& h : header) os << h << '\n';
    os << "sample_rate_hz=" << fmt_double(tr.sample_rate_hz) << '\n'
       << "duration_s=" << fmt_double(tr.duration_s) << '\n'
       << "trace_seed=" << tr.seed << '\n'
       << "trace_digest=" << tr.scenario_digest << '\n'
       << "n_samples=" << tr.samples.size() << '\n'
       << "format=float64-le\n\n";
    for (double v : tr.samples) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        char b[8];
        std::memcpy(b, &bits, 8);
        os.write(b, 8);
    }
}

PhotocurrentTrace read_trace_binary(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "HETNOISE-TRACE 1") throw config_error("trace: not a hetnoise binary trace");
    PhotocurrentTrace tr;
    std::size_t n = 0;
    while (std::getline(is, line) && !line.empty()) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "sample_rate_hz") tr.sample_rate_hz = std::stod(v);
        else if (k == "duration_s") tr.duration_s = std::stod(v);
        else if (k == "trace_seed") tr.seed = std::stoull(v);
        else if (k == "trace_digest") tr.scenario_digest = v;
        else if (k == "n_samples") n = std::stoull(v);
    }
    tr.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        char b[8];
        if (!is.read(b, 8)) throw config_error("trace: truncated sample data");
        std::uint64_t bits;
        std::memcpy(&bits, b, 8);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        tr.samples[i] = std::bit_cast<double>(bits);
    }
    return tr;
}

void write_trace_csv(std::ostream& os, const PhotocurrentTrace& tr, const std::vector<std::string>& header) {
    for (const auto& h : header) os << "# " << h << '\n';
    os << "# sample_rate_hz=" << fmt_double(tr.sample_rate_hz) << "\nt_s,current_a\n";
    char buf[64];
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.17g\n", static_cast<double>(i) / tr.sample_rate_hz, tr.samples[i]);
        os << buf;
    }
}

} // namespace hetnoise
