#include "hetnoise/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace hetnoise::analytic {

namespace {

// Detected amplitudes: eta applied to the flux of both fields.
double detected(double amplitude, const DetectorConfig& cfg) { return std::sqrt(cfg.eta) * amplitude; }

double to_db(double x) { return 10.0 * std::log10(x); }

void require_not_vacuum_with_amplitude(const SignalField& sig) {
    if (std::holds_alternative<Vacuum>(sig.state) && sig.alpha_s != 0.0)
        throw invariant_error("vacuum signal must have zero mean amplitude");
}

} // namespace

double photon_flux(double p_opt_w, double lambda_m) {
    if (!(lambda_m > 0.0)) throw std::domain_error("photon_flux: wavelength must be positive");
    if (!(p_opt_w >= 0.0)) throw std::domain_error("photon_flux: optical power must be >= 0");
    return p_opt_w * lambda_m / (constants::planck * constants::speed_of_light);
}

double snr_input_db(double p_s_w, const DetectorConfig& cfg) {
    if (!(p_s_w > 0.0)) throw std::domain_error("snr_input: signal power must be positive");
    return to_db(cfg.eta * photon_flux(p_s_w, cfg.wavelength_m) * cfg.measurement_time());
}

double snr_output_db(const PowerPair& pp, double rbw_hz) { return to_db(pp.p_i_w / (pp.p_n_w_per_hz * rbw_hz)); }

double noise_figure(double snr_in_db, double snr_out_db) { return snr_in_db - snr_out_db; }

double squeezed_noise_factor(double s, double phi) {
    return std::cosh(2.0 * s) + std::sinh(2.0 * s) * std::cos(2.0 * phi);
}

double mono_beat_amplitude(const SignalField& sig, const MonoLo& lo, const DetectorConfig& cfg) {
    return cfg.e_charge * detected(sig.alpha_s, cfg) * detected(lo.e_l, cfg);
}

double mono_mean_current(double t, const SignalField& sig, const MonoLo& lo, const PhaseConfig& phases,
                         const DetectorConfig& cfg) {
    const double omega = sig.omega_s - lo.omega_0;
    const double amp = mono_beat_amplitude(sig, lo, cfg);
    return amp * std::cos(omega * t + phases.phi() - phases.delta_phi());
}

PowerPair mono_heterodyne_powers(const SignalField& sig, const MonoLo& lo, const PhaseConfig& phases,
                                 const DetectorConfig& cfg) {
    require_not_vacuum_with_amplitude(sig);
    const double a = detected(sig.alpha_s, cfg);
    const double el = detected(lo.e_l, cfg);
    const double shot = std::pow(cfg.e_charge * el, 2);

    PowerPair pp;
    pp.p_i_w = std::pow(cfg.e_charge * a * el, 2) / 2.0;
    pp.p_n_w_per_hz = shot;
    if (const auto* sq = std::get_if<TwoModeSqueezed>(&sig.state)) {
        double factor;
        if (const auto* l = std::get_if<Locked>(&phases.mode))
            factor = squeezed_noise_factor(sq->s, l->k * constants::pi);
        else
            factor = std::cosh(2.0 * sq->s); // uniform phi: <cos^2> = <sin^2> = 1/2
        pp.p_n_w_per_hz = shot * factor;
    }
    return pp;
}

PowerPair homodyne_powers(const SignalField& sig, double e_l, const DetectorConfig& cfg) {
    require_not_vacuum_with_amplitude(sig);
    const double a = detected(sig.alpha_s, cfg);
    const double el = detected(e_l, cfg);
    // signal and image coincide, so the beat amplitude doubles relative to
    // a single-sideband heterodyne while the vacuum noise is counted once
    return {std::pow(cfg.e_charge * a * el, 2), std::pow(cfg.e_charge * el, 2)};
}

double blo_beat_amplitude(const SignalField& sig, const BichromaticLo& lo, const DetectorConfig& cfg) {
    return std::sqrt(2.0) * cfg.e_charge * detected(lo.e_l, cfg) * detected(sig.alpha_s, cfg);
}

double blo_mean_current(double t, const SignalField& sig, const BichromaticLo& lo, const PhaseConfig& phases,
                        const DetectorConfig& cfg) {
    const double omega = lo.omega_1 - sig.omega_s;
    const double amp = blo_beat_amplitude(sig, lo, cfg) * std::cos(phases.effective_phi_prime());
    return amp * std::cos(omega * t + phases.delta_phi_prime());
}

PowerPair blo_powers(const SignalField& sig, const BichromaticLo& lo, const PhaseConfig& phases,
                     NoiseHypothesis hyp, const DetectorConfig& cfg) {
    if (std::holds_alternative<TwoModeSqueezed>(sig.state))
        throw unsupported_error("bichromatic LO: no noise formula for squeezed input");
    require_not_vacuum_with_amplitude(sig);

    const double a = detected(sig.alpha_s, cfg);
    const double el = detected(lo.e_l, cfg);
    const double peak = std::pow(cfg.e_charge * a * el, 2);

    PowerPair pp;
    // (sqrt2 A cos phi')^2 / 2 over the beat period; cos^2(k pi) = 1 when locked,
    // <cos^2 phi'> = 1/2 when averaged
    pp.p_i_w = std::holds_alternative<Locked>(phases.mode) ? peak : peak / 2.0;
    pp.p_n_w_per_hz = correlation_noise_power(lo.e_l, hyp == NoiseHypothesis::StandardImageVacuum ? 0.0 : -1.0, cfg);
    return pp;
}

double correlation_noise_power(double e_l, double corr_c, const DetectorConfig& cfg) {
    if (corr_c < -2.0) throw std::domain_error("correlation_noise_power: C < -2 gives a negative density");
    return std::pow(cfg.e_charge * detected(e_l, cfg), 2) * (1.0 + corr_c / 2.0);
}

std::string detector_kind_name(DetectorKind k) {
    switch (k) {
    case DetectorKind::Homodyne: return "homodyne";
    case DetectorKind::MonoHeterodyne: return "mono-heterodyne";
    case DetectorKind::BloHeterodyne: return "blo-heterodyne";
    }
    return "?";
}

double nf_predicted(DetectorKind kind, const PhaseMode& mode, NoiseHypothesis hyp, double alpha_s, double e_l) {
    DetectorConfig cfg;
    cfg.eta = 1.0;
    cfg.rbw_hz = 1.0;
    cfg.t_meas_s = 1.0;

    // Frequencies only fix the geometry; the formulas do not depend on them.
    const double omega_s = 1.77e15;
    const double omega = 8.17e6;
    const auto sig = SignalField::make(omega_s, alpha_s, 0.0, Coherent{});
    PhaseConfig phases;
    phases.mode = mode;

    PowerPair pp;
    switch (kind) {
    case DetectorKind::Homodyne: pp = homodyne_powers(sig, e_l, cfg); break;
    case DetectorKind::MonoHeterodyne:
        pp = mono_heterodyne_powers(sig, make_mono_lo(omega_s - omega, e_l, 0.0), phases, cfg);
        break;
    case DetectorKind::BloHeterodyne:
        pp = blo_powers(sig, make_bichromatic_lo(omega_s + omega, omega_s - omega, e_l, 0.0, 0.0), phases, hyp, cfg);
        break;
    }
    const double snr_in = to_db(cfg.eta * alpha_s * alpha_s * cfg.measurement_time());
    return noise_figure(snr_in, snr_output_db(pp, cfg.rbw_hz));
}

} // namespace hetnoise::analytic
