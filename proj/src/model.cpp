#include "hetnoise/model.hpp"

#include <cmath>
#include <limits>

namespace hetnoise {

double wrap_phase(double rad) {
    double r = std::fmod(rad, constants::two_pi);
    if (r < 0.0) r += constants::two_pi;
    // fmod of a tiny negative value can round up to exactly 2*pi
    if (r >= constants::two_pi) r = 0.0;
    return r;
}

std::string state_name(const StateKind& st) {
    if (std::holds_alternative<Coherent>(st)) return "coherent";
    if (std::holds_alternative<Vacuum>(st)) return "vacuum";
    return "squeezed";
}

SignalField SignalField::make(double omega_s, double alpha_s, double phi_s, StateKind state) {
    if (!(omega_s > 0.0) || !std::isfinite(omega_s))
        throw invariant_error("signal: omega_s must be positive and finite");
    if (!(alpha_s >= 0.0) || !std::isfinite(alpha_s))
        throw invariant_error("signal: alpha_s must be >= 0");
    if (std::holds_alternative<Vacuum>(state) && alpha_s != 0.0)
        throw invariant_error("signal: vacuum state requires zero mean amplitude");
    if (const auto* sq = std::get_if<TwoModeSqueezed>(&state)) {
        if (!std::isfinite(sq->s) || sq->s < 0.0)
            throw invariant_error("signal: squeezing parameter must be finite and >= 0");
    }
    return SignalField{omega_s, alpha_s, phi_s, state};
}

MonoLo make_mono_lo(double omega_0, double e_l, double phi_0) {
    if (!(e_l > 0.0)) throw invariant_error("local oscillator: amplitude must be positive");
    if (!(omega_0 > 0.0)) throw invariant_error("local oscillator: omega_0 must be positive");
    return MonoLo{omega_0, e_l, phi_0};
}

BichromaticLo make_bichromatic_lo(double omega_1, double omega_2, double e_l, double phi_1, double phi_2) {
    if (!(e_l > 0.0)) throw invariant_error("local oscillator: amplitude must be positive");
    if (!(omega_1 > omega_2)) throw invariant_error("bichromatic LO: omega_1 must exceed omega_2");
    if (!(omega_2 > 0.0)) throw invariant_error("bichromatic LO: tone frequencies must be positive");
    return BichromaticLo{omega_1, omega_2, e_l, phi_1, phi_2};
}

double lo_amplitude(const LocalOscillator& lo) {
    return std::visit([](const auto& l) { return l.e_l; }, lo);
}

namespace {

double frequency_tolerance(double omega_ref, double beat) {
    const double ulp = std::nextafter(omega_ref, std::numeric_limits<double>::infinity()) - omega_ref;
    return std::max(1e-6 * std::abs(beat), 16.0 * ulp);
}

} // namespace

double beat_angular_frequency(const SignalField& sig, const LocalOscillator& lo) {
    if (const auto* m = std::get_if<MonoLo>(&lo)) {
        const double omega = sig.omega_s - m->omega_0;
        if (!(omega > 0.0)) throw config_error("mono LO: omega_s must exceed omega_0");
        return omega;
    }
    const auto& b = std::get<BichromaticLo>(lo);
    const double upper = b.omega_1 - sig.omega_s;
    const double lower = sig.omega_s - b.omega_2;
    if (!(upper > 0.0) || !(lower > 0.0))
        throw config_error("bichromatic LO: tones must straddle the signal frequency");
    if (std::abs(upper - lower) > frequency_tolerance(sig.omega_s, upper))
        throw config_error("bichromatic LO: tones are not symmetric about the signal frequency");
    return 0.5 * (upper + lower);
}

ImageBandSet ImageBandSet::for_geometry(const SignalField& sig, const LocalOscillator& lo, double phi_i,
                                        double phi_i2) {
    ImageBandSet set;
    if (const auto* m = std::get_if<MonoLo>(&lo)) {
        set.modes.push_back({2.0 * m->omega_0 - sig.omega_s, phi_i, Vacuum{}});
        return set;
    }
    const auto& b = std::get<BichromaticLo>(lo);
    const double omega = beat_angular_frequency(sig, lo);
    set.modes.push_back({b.omega_1 + omega, phi_i, Vacuum{}});
    set.modes.push_back({b.omega_2 - omega, phi_i2, Vacuum{}});
    return set;
}

void validate_images(const ImageBandSet& images, const SignalField& sig, const LocalOscillator& lo) {
    const double omega = beat_angular_frequency(sig, lo);
    const double tol = frequency_tolerance(sig.omega_s, omega);
    for (const auto& m : images.modes) {
        if (!std::holds_alternative<Vacuum>(m.state))
            throw unsupported_error("image band: only vacuum image modes are modeled");
    }
    if (const auto* mono = std::get_if<MonoLo>(&lo)) {
        if (images.modes.size() != 1) throw config_error("image band: mono LO needs exactly one image mode");
        if (std::abs(images.modes[0].omega - (2.0 * mono->omega_0 - sig.omega_s)) > tol)
            throw config_error("image band: omega_i must equal 2*omega_0 - omega_s");
        return;
    }
    const auto& b = std::get<BichromaticLo>(lo);
    if (images.modes.size() != 2) throw config_error("image band: bichromatic LO needs two image modes");
    if (std::abs((images.modes[0].omega - b.omega_1) - omega) > tol ||
        std::abs((b.omega_2 - images.modes[1].omega) - omega) > tol)
        throw config_error("image band: omega_i1 - omega_1 and omega_2 - omega_i2 must equal Omega");
}

std::string phase_mode_name(const PhaseMode& m) {
    if (std::holds_alternative<Averaged>(m)) return "averaged";
    if (std::holds_alternative<Locked>(m)) return "locked";
    return "scan";
}

double PhaseConfig::phi() const { return wrap_phase(phi_0 - 0.5 * (phi_s + phi_i)); }
double PhaseConfig::delta_phi() const { return wrap_phase(0.5 * (phi_s - phi_i)); }
double PhaseConfig::phi_prime() const { return wrap_phase(phi_s - 0.5 * (phi_1 + phi_2)); }
double PhaseConfig::delta_phi_prime() const { return wrap_phase(0.5 * (phi_2 - phi_1)); }

double PhaseConfig::effective_phi_prime() const {
    if (const auto* l = std::get_if<Locked>(&mode)) return wrap_phase(l->k * constants::pi);
    return phi_prime();
}

void DetectorConfig::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw invariant_error("eta: must lie in (0, 1]");
    if (!(rbw_hz > 0.0)) throw invariant_error("rbw: must be positive");
    if (!(gain > 0.0)) throw invariant_error("gain: must be positive");
    if (t_meas_s && !(*t_meas_s > 0.0)) throw invariant_error("t_meas: must be positive");
    if (!(e_charge > 0.0)) throw invariant_error("e_charge: must be positive");
    if (!(wavelength_m > 0.0)) throw invariant_error("wavelength: must be positive");
}

std::string hypothesis_name(NoiseHypothesis h) {
    return h == NoiseHypothesis::StandardImageVacuum ? "standard" : "cancel";
}

} // namespace hetnoise
