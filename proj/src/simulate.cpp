#include "hetnoise/simulate.hpp"

#include "hetnoise/analytic.hpp"
#include "hetnoise/parallel.hpp"
#include "hetnoise/rng.hpp"
#include "hetnoise/scenario_io.hpp"

#include <cmath>
#include <string>

namespace hetnoise {

double Scenario::beat_hz() const { return beat_angular_frequency(sig, lo) / constants::two_pi; }

void Scenario::validate() const {
    cfg.validate();
    const double f_beat = beat_hz(); // also checks LO symmetry
    validate_images(images, sig, lo);

    if (!is_bichromatic()) {
        if (hyp == NoiseHypothesis::VacuumCancellation)
            throw config_error("hypothesis: vacuum cancellation is defined for a bichromatic LO only");
        if (cyclostationary) throw config_error("cyclostationary: the 2*Omega noise term exists for a bichromatic LO only");
    } else if (std::holds_alternative<TwoModeSqueezed>(sig.state)) {
        throw unsupported_error("state: squeezed input is supported with a mono LO only");
    }

    if (!(sample_rate_hz >= 10.0 * f_beat))
        throw config_error("sample_rate: " + std::to_string(sample_rate_hz) + " Hz is below 10x the beat frequency (" +
                           std::to_string(10.0 * f_beat) + " Hz)");
    if (!(duration_s * cfg.rbw_hz >= 1.0))
        throw config_error("duration: need at least 1/rbw = " + std::to_string(1.0 / cfg.rbw_hz) + " s");
    if (!(dark_density_a2_per_hz >= 0.0)) throw config_error("dark_density: must be >= 0");

    if (const auto* sc = std::get_if<Scanned>(&phases.mode)) {
        if (!(sc->jitter_rms >= 0.0)) throw config_error("jitter_rms: must be >= 0");
        if (!(sc->jitter_tau_s > 0.0)) throw config_error("jitter_tau: must be positive");
        if (std::abs(sc->rate) / constants::two_pi > 1e-3 * f_beat)
            throw config_error("scan_rate: fringes must be quasi-static (rate/2pi <= 1e-3 x beat frequency)");
    }
}

double injected_noise_density(const Scenario& sc) {
    double pn;
    if (const auto* b = std::get_if<BichromaticLo>(&sc.lo)) {
        pn = analytic::correlation_noise_power(b->e_l, sc.hyp == NoiseHypothesis::StandardImageVacuum ? 0.0 : -1.0,
                                               sc.cfg);
    } else {
        pn = analytic::correlation_noise_power(lo_amplitude(sc.lo), 0.0, sc.cfg);
    }
    return pn + sc.dark_density_a2_per_hz;
}

double realized_phase(const Scenario& sc) {
    if (const auto* l = std::get_if<Locked>(&sc.phases.mode)) return wrap_phase(l->k * constants::pi);
    if (std::holds_alternative<Averaged>(sc.phases.mode)) {
        auto eng = rng::substream(sc.seed, rng::Stream::Phase, 0);
        return std::uniform_real_distribution<double>(0.0, constants::two_pi)(eng);
    }
    return sc.is_bichromatic() ? sc.phases.phi_prime() : sc.phases.phi();
}

namespace {

// Relative phase as a function of sample index.
class PhasePath {
public:
    PhasePath(const Scenario& sc, std::size_t n_samples) : fs_(sc.sample_rate_hz) {
        base_ = realized_phase(sc);
        const auto* scan = std::get_if<Scanned>(&sc.phases.mode);
        if (!scan) return;
        rate_ = scan->rate;
        if (scan->jitter_rms <= 0.0) return;

        // Ornstein-Uhlenbeck walk on a decimated grid, stationary RMS jitter_rms.
        const std::size_t points = n_samples / kJitterStride + 2;
        const double a = std::exp(-static_cast<double>(kJitterStride) / (fs_ * scan->jitter_tau_s));
        const double kick = scan->jitter_rms * std::sqrt(1.0 - a * a);
        auto eng = rng::substream(sc.seed, rng::Stream::Jitter, 0);
        std::normal_distribution<double> z;
        jitter_.resize(points);
        jitter_[0] = scan->jitter_rms * z(eng);
        for (std::size_t k = 1; k < points; ++k) jitter_[k] = a * jitter_[k - 1] + kick * z(eng);
    }

    double operator()(std::size_t n) const {
        double p = base_ + rate_ * (static_cast<double>(n) / fs_);
        if (!jitter_.empty()) {
            const std::size_t k = n / kJitterStride;
            const double frac = static_cast<double>(n % kJitterStride) / kJitterStride;
            p += jitter_[k] + frac * (jitter_[k + 1] - jitter_[k]);
        }
        return p;
    }

    bool constant() const { return rate_ == 0.0 && jitter_.empty(); }

private:
    double fs_;
    double base_ = 0.0;
    double rate_ = 0.0;
    std::vector<double> jitter_;
};

// Fractional number of cycles of a tone at f after n samples, in [0, 1).
double cycles(double f, std::size_t n, double fs) {
    const double c = f * static_cast<double>(n) / fs;
    return c - std::floor(c);
}

struct Synth {
    const Scenario& sc;
    std::size_t n_samples;
    PhasePath path;
    double f_beat;
    double beat_amp;       // peak mean current at unit phase factor
    double offset;         // delta phi' (BLO) or -delta phi (mono)
    double noise_density;  // P_n before dark
    double dark;
    double cyclo_depth = 0.0;
    double cyclo_phase = 0.0;
    double squeeze_s = -1.0; // < 0: coherent

    explicit Synth(const Scenario& s)
        : sc(s), n_samples(static_cast<std::size_t>(std::llround(s.sample_rate_hz * s.duration_s))),
          path(s, n_samples), f_beat(s.beat_hz()), dark(s.dark_density_a2_per_hz) {
        noise_density = injected_noise_density(sc) - dark;
        if (const auto* b = std::get_if<BichromaticLo>(&sc.lo)) {
            beat_amp = analytic::blo_beat_amplitude(sc.sig, *b, sc.cfg);
            offset = sc.phases.delta_phi_prime();
            if (sc.cyclostationary) {
                // 4 + 2cos -> 1 + cos/2 ; 2 + 2cos -> 1 + cos, both with unit time average
                cyclo_depth = sc.hyp == NoiseHypothesis::StandardImageVacuum ? 0.5 : 1.0;
                cyclo_phase = b->phi_2 - b->phi_1;
            }
        } else {
            beat_amp = analytic::mono_beat_amplitude(sc.sig, std::get<MonoLo>(sc.lo), sc.cfg);
            offset = -sc.phases.delta_phi();
            if (const auto* sq = std::get_if<TwoModeSqueezed>(&sc.sig.state)) squeeze_s = sq->s;
        }
    }

    double mean(std::size_t n, double phase) const {
        const double carrier = constants::two_pi * cycles(f_beat, n, sc.sample_rate_hz);
        if (sc.is_bichromatic()) return beat_amp * std::cos(phase) * std::cos(carrier + offset);
        return beat_amp * std::cos(carrier + phase + offset);
    }

    double variance(std::size_t n, double phase) const {
        double d = noise_density;
        if (cyclo_depth > 0.0)
            d *= 1.0 + cyclo_depth * std::cos(constants::two_pi * cycles(2.0 * f_beat, n, sc.sample_rate_hz) +
                                              cyclo_phase);
        if (squeeze_s >= 0.0) d *= analytic::squeezed_noise_factor(squeeze_s, phase);
        return (d + dark) * sc.sample_rate_hz / 2.0;
    }

    void fill(std::vector<double>& out, unsigned workers) const {
        out.assign(n_samples, 0.0);
        const std::size_t n_segments = (n_samples + kNoiseSegment - 1) / kNoiseSegment;
        parallel_for(n_segments, workers, [&](std::size_t seg) {
            auto eng = rng::substream(sc.seed, rng::Stream::Noise, seg);
            std::normal_distribution<double> z;
            const std::size_t begin = seg * kNoiseSegment;
            const std::size_t end = std::min(n_samples, begin + kNoiseSegment);
            const bool stationary = cyclo_depth == 0.0 && squeeze_s < 0.0;
            const double sigma0 = std::sqrt(variance(0, path(0)));
            for (std::size_t n = begin; n < end; ++n) {
                const double phase = path(n);
                const double sigma = stationary ? sigma0 : std::sqrt(variance(n, phase));
                out[n] = mean(n, phase) + sigma * z(eng);
            }
        });
    }
};

} // namespace

PhotocurrentTrace synth_trace(const Scenario& sc, unsigned workers) {
    sc.validate();
    Synth synth(sc);
    PhotocurrentTrace tr;
    tr.sample_rate_hz = sc.sample_rate_hz;
    tr.seed = sc.seed;
    tr.scenario_digest = scenario_digest(sc);
    tr.duration_s = sc.duration_s;
    synth.fill(tr.samples, workers);
    return tr;
}

PhaseScanResult phase_scan_trace(const Scenario& sc, unsigned workers, std::size_t record_stride) {
    if (!std::holds_alternative<Scanned>(sc.phases.mode))
        throw config_error("phase_mode: phase scan requires phase_mode = scan");
    if (record_stride == 0) record_stride = 1;
    PhaseScanResult res;
    res.trace = synth_trace(sc, workers);

    const Synth synth(sc);
    for (std::size_t n = 0; n < synth.n_samples; n += record_stride) {
        const double phase = synth.path(n);
        res.record.t_s.push_back(static_cast<double>(n) / sc.sample_rate_hz);
        res.record.phase_rad.push_back(phase);
        res.record.beat_amplitude_a.push_back(sc.is_bichromatic() ? synth.beat_amp * std::abs(std::cos(phase))
                                                                  : synth.beat_amp);
    }
    return res;
}

} // namespace hetnoise
