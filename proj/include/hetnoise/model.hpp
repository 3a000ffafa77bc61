#pragma once

// Domain types for balanced optical heterodyne detection.
//
// Field amplitudes are carried in sqrt(photons/s), so that |alpha|^2 is a
// photon flux. Photocurrents are in amperes across a 1 ohm load, which makes
// current-squared numerically equal to watts. An explicit electronic power
// gain maps those internal watts onto what a spectrum analyzer displays.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hetnoise {

namespace constants {
inline constexpr double planck = 6.62607015e-34;      // J s
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double electron_charge = 1.602176634e-19;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
} // namespace constants

/// Invalid scenario or run configuration (bad key, aliasing, too-short trace).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A combination the closed-form theory has no formula for.
class unsupported_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A domain type invariant was violated.
class invariant_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Reduce an angle into [0, 2*pi).
double wrap_phase(double rad);

// ---------------------------------------------------------------------------
// Quantum state of an optical mode

struct Coherent {};
struct Vacuum {};
struct TwoModeSqueezed {
    double s = 0.0; ///< squeezing parameter, finite and >= 0
};
using StateKind = std::variant<Coherent, Vacuum, TwoModeSqueezed>;

std::string state_name(const StateKind& st);

struct SignalField {
    double omega_s = 0.0; ///< optical angular frequency, rad/s
    double alpha_s = 0.0; ///< real mean amplitude, sqrt(photons/s)
    double phi_s = 0.0;
    StateKind state = Coherent{};

    /// Validating constructor; throws invariant_error.
    static SignalField make(double omega_s, double alpha_s, double phi_s, StateKind state);
};

// ---------------------------------------------------------------------------
// Local oscillators

struct MonoLo {
    double omega_0 = 0.0;
    double e_l = 0.0; ///< real amplitude, sqrt(photons/s)
    double phi_0 = 0.0;
};

/// Two tones omega_1 > omega_2, each carrying e_l/sqrt(2). The total flux is e_l^2.
struct BichromaticLo {
    double omega_1 = 0.0;
    double omega_2 = 0.0;
    double e_l = 0.0;
    double phi_1 = 0.0;
    double phi_2 = 0.0;
};

using LocalOscillator = std::variant<MonoLo, BichromaticLo>;

MonoLo make_mono_lo(double omega_0, double e_l, double phi_0);
BichromaticLo make_bichromatic_lo(double omega_1, double omega_2, double e_l, double phi_1, double phi_2);

double lo_amplitude(const LocalOscillator& lo);

/// Beat (heterodyne) angular frequency Omega of a signal against an LO.
/// Throws config_error when a bichromatic LO is not symmetric about omega_s,
/// or when the beat frequency is not positive.
double beat_angular_frequency(const SignalField& sig, const LocalOscillator& lo);

// ---------------------------------------------------------------------------
// Image sidebands

struct ImageMode {
    double omega = 0.0;
    double phi = 0.0;
    StateKind state = Vacuum{};
};

struct ImageBandSet {
    std::vector<ImageMode> modes; ///< one for mono LO, two (i1, i2) for BLO

    /// Image modes implied by the signal/LO geometry, all in vacuum.
    static ImageBandSet for_geometry(const SignalField& sig, const LocalOscillator& lo, double phi_i = 0.0,
                                     double phi_i2 = 0.0);
};

/// Checks mode count and frequency placement against the LO; throws config_error.
void validate_images(const ImageBandSet& images, const SignalField& sig, const LocalOscillator& lo);

// ---------------------------------------------------------------------------
// Phases

struct Averaged {};
struct Locked {
    int k = 0; ///< phi' held at k*pi
};
struct Scanned {
    double rate = 0.0;         ///< rad/s
    double jitter_rms = 0.0;   ///< rad
    double jitter_tau_s = 1e-3; ///< correlation time of the jitter walk
};
using PhaseMode = std::variant<Averaged, Locked, Scanned>;

std::string phase_mode_name(const PhaseMode& m);

/// Raw optical phases plus the derived combinations the detector responds to.
/// Derived values are computed on access, so they cannot go stale.
class PhaseConfig {
public:
    PhaseConfig() = default;

    double phi_s = 0.0;
    double phi_0 = 0.0;  ///< mono LO
    double phi_i = 0.0;  ///< mono image (also i1 for BLO)
    double phi_i2 = 0.0;
    double phi_1 = 0.0;  ///< BLO upper tone
    double phi_2 = 0.0;  ///< BLO lower tone
    PhaseMode mode = Averaged{};

    /// phi_0 - (phi_s + phi_i)/2
    double phi() const;
    /// (phi_s - phi_i)/2
    double delta_phi() const;
    /// phi_s - (phi_1 + phi_2)/2
    double phi_prime() const;
    /// (phi_2 - phi_1)/2
    double delta_phi_prime() const;

    /// phi' the detector actually sees: k*pi when locked, phi_prime() otherwise.
    double effective_phi_prime() const;
};

// ---------------------------------------------------------------------------
// Detector

struct DetectorConfig {
    double eta = 1.0;
    double e_charge = constants::electron_charge;
    double gain = 1.0; ///< electronic power gain applied to 1-ohm photocurrent power
    double rbw_hz = 1000.0;
    std::optional<double> t_meas_s; ///< defaults to 1/rbw_hz
    double wavelength_m = 1064e-9;

    double measurement_time() const { return t_meas_s ? *t_meas_s : 1.0 / rbw_hz; }

    /// Throws invariant_error on eta outside (0,1], or non-positive rbw/gain/t_meas.
    void validate() const;
};

enum class NoiseHypothesis { StandardImageVacuum, VacuumCancellation };

std::string hypothesis_name(NoiseHypothesis h);

// ---------------------------------------------------------------------------
// Data products

struct PhotocurrentTrace {
    double sample_rate_hz = 0.0;
    std::vector<double> samples; ///< amperes, 1 ohm, before gain
    std::uint64_t seed = 0;
    std::string scenario_digest;
    double duration_s = 0.0;
};

struct PsdEstimate {
    std::vector<double> freq_bins_hz;
    std::vector<double> density_w_per_hz; ///< one-sided, 1 ohm, after gain
    double rbw_hz = 0.0;                  ///< equivalent noise bandwidth actually realized
    double bin_width_hz = 0.0;
    std::size_t n_averages = 0;
    std::string window_name;
};

struct NoiseFigureReport {
    double p_s_w = 0.0;
    double snr_in_db = 0.0;
    double snr_in_err_plus_db = 0.0;
    double snr_in_err_minus_db = 0.0;
    double snr_out_db = 0.0;
    double snr_out_err_db = 0.0;
    double nf_db = 0.0;
    double nf_err_plus_db = 0.0;
    double nf_err_minus_db = 0.0;
    NoiseHypothesis hypothesis = NoiseHypothesis::StandardImageVacuum;
    std::string phase_mode;
    std::string scenario_digest;
    std::vector<std::uint64_t> seeds;
};

} // namespace hetnoise
