#pragma once

// Closed-form detection theory for mono and bichromatic LO heterodyne
// detectors. Every power here is pre-gain, referred to a 1 ohm load.
//
// Quantum efficiency is folded into the field amplitudes: both alpha_s and
// E_l are scaled by sqrt(eta) before conversion to current, so a detected
// flux of eta*alpha_s^2 photons/s is what reaches the photocurrent.
//
// P_n is a one-sided density in W/Hz. With a measurement time of one second
// it is numerically the noise power, which is how the textbook formulas
// state it.

#include "hetnoise/model.hpp"

namespace hetnoise::analytic {

struct PowerPair {
    double p_i_w = 0.0;          ///< mean beat-note power at Omega
    double p_n_w_per_hz = 0.0;   ///< quantum-noise density
};

/// Photons per second carried by an optical power. Throws std::domain_error
/// for a non-positive wavelength or negative power.
double photon_flux(double p_opt_w, double lambda_m);

/// 10 log10(eta * flux * t_meas): the coherent-state input SNR, which equals
/// the detected photon number in one measurement time.
double snr_input_db(double p_s_w, const DetectorConfig& cfg);

/// Output SNR in dB when the noise density is read in one resolution bandwidth.
double snr_output_db(const PowerPair& pp, double rbw_hz);

double noise_figure(double snr_in_db, double snr_out_db);

/// Noise multiplier for a two-mode squeezed input at quadrature angle phi:
/// e^{2s} cos^2 phi + e^{-2s} sin^2 phi, written as cosh 2s + sinh 2s cos 2phi
/// so that s = 0 yields exactly 1.
double squeezed_noise_factor(double s, double phi);

/// Peak beat-note current e E_l alpha_s of a mono-LO detector.
double mono_beat_amplitude(const SignalField& sig, const MonoLo& lo, const DetectorConfig& cfg);

/// Mean photocurrent of a mono-LO heterodyne detector.
double mono_mean_current(double t, const SignalField& sig, const MonoLo& lo, const PhaseConfig& phases,
                         const DetectorConfig& cfg);

PowerPair mono_heterodyne_powers(const SignalField& sig, const MonoLo& lo, const PhaseConfig& phases,
                                 const DetectorConfig& cfg);

/// Degenerate limit where the signal mode is its own image: balanced homodyne
/// detection of the amplitude quadrature.
PowerPair homodyne_powers(const SignalField& sig, double e_l, const DetectorConfig& cfg);

/// sqrt2 e E_l alpha_s: the BLO beat-note amplitude at phi' = 0.
double blo_beat_amplitude(const SignalField& sig, const BichromaticLo& lo, const DetectorConfig& cfg);

/// (sqrt2 e E_l alpha_s cos phi') cos(Omega t + delta phi').
double blo_mean_current(double t, const SignalField& sig, const BichromaticLo& lo, const PhaseConfig& phases,
                        const DetectorConfig& cfg);

/// Time-averaged powers for a coherent signal against a bichromatic LO.
/// Averaged and Scanned modes average cos^2 phi' over a uniform phase;
/// Locked holds phi' = k pi. Throws unsupported_error for squeezed input.
PowerPair blo_powers(const SignalField& sig, const BichromaticLo& lo, const PhaseConfig& phases,
                     NoiseHypothesis hyp, const DetectorConfig& cfg);

/// (e E_l)^2 [1 + C/2]. C = 0 recovers the standard image-vacuum density and
/// C = -1 the cancellation density. Throws std::domain_error for C < -2.
double correlation_noise_power(double e_l, double corr_c, const DetectorConfig& cfg);

enum class DetectorKind { Homodyne, MonoHeterodyne, BloHeterodyne };

std::string detector_kind_name(DetectorKind k);

/// Noise figure implied by the power formulas for a coherent input, evaluated
/// at the given amplitudes with eta = 1 and a one second measurement.
double nf_predicted(DetectorKind kind, const PhaseMode& mode, NoiseHypothesis hyp, double alpha_s = 1e4,
                    double e_l = 1e7);

} // namespace hetnoise::analytic
