#pragma once

// End-to-end experiments: Monte Carlo traces read through the analyzer model,
// compared with the closed-form oracle and with the published measurements.

#include "hetnoise/analytic.hpp"
#include "hetnoise/model.hpp"
#include "hetnoise/simulate.hpp"
#include "hetnoise/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnoise {

/// Gain that puts the cancellation-hypothesis shot-noise floor of a 1.0 mW
/// LO at -139 dBm/Hz with eta = 0.7 at 1064 nm. Output of calibrate_gain(),
/// frozen as the default.
inline constexpr double kCalibratedGain = 261605.13991367517;

/// The tone at Omega cannot be separated from the floor with the averaging
/// requested.
class resolution_error : public std::runtime_error {
public:
    resolution_error(const std::string& what, double required_averages)
        : std::runtime_error(what), required_averages(required_averages) {}
    double required_averages;
};

namespace pipeline {

/// G such that the analytic noise density for `lo_power_w`, times G and
/// expressed in dBm/Hz, equals the target.
double calibrate_gain(double target_dbm_per_hz, double lo_power_w, const DetectorConfig& cfg,
                      NoiseHypothesis hyp = NoiseHypothesis::VacuumCancellation);

/// Replace the LO power of a scenario (total optical power, in watts).
Scenario with_lo_power(Scenario sc, double lo_power_w);
/// Replace the signal power; 0 blocks the signal.
Scenario with_signal_power(Scenario sc, double p_s_w);
double signal_power_w(const Scenario& sc);

/// Closed-form SNR_out (dB) at the realized analyzer RBW.
double analytic_snr_out_db(const Scenario& sc, const spectral::SegmentPlan& plan);

struct NfOptions {
    std::size_t n_windows = 16;          ///< analyzer windows per seed
    double floor_halfspan_hz = 100e3;     ///< floor read within +-halfspan of Omega
    double floor_exclusion_hz = 10e3;     ///< ... skipping the tone neighborhood
    double tone_bandwidth_rbw = 4.0;      ///< tone marker width in RBWs
    spectral::Window window = spectral::Window::Hann;
    double p_s_err_w = 0.0;               ///< optical power uncertainty folded into SNR_in
    unsigned workers = 0;
};

struct SeedMeasurement {
    std::uint64_t seed = 0;
    double tone_w = 0.0;          ///< mean tone power over windows, post-gain, floor removed
    double floor_w_per_hz = 0.0;  ///< mean floor density, post-gain
    double snr_out_db = 0.0;
};

struct NfMeasurement {
    NoiseFigureReport report;
    std::vector<SeedMeasurement> per_seed;
    double tone_w = 0.0;
    double floor_w_per_hz = 0.0;
    double rbw_hz = 0.0;
    double analytic_snr_out_db = 0.0;
};

/// Measures SNR_out over n_seeds seeds (sc.seed, sc.seed+1, ...). Averaged
/// mode sweeps phi' once through 2pi across the analyzer windows of each seed
/// from a seed-drawn start and averages the fringe power; Locked reads the
/// peak. Throws resolution_error when the tone does not clear the floor.
NfMeasurement measure_nf(const Scenario& sc, std::size_t n_seeds, const NfOptions& opts = {});

inline NoiseFigureReport run_nf_experiment(const Scenario& sc, std::size_t n_seeds, const NfOptions& opts = {}) {
    return measure_nf(sc, n_seeds, opts).report;
}

struct DoublingResult {
    double floor_low_w_per_hz = 0.0;  ///< post-gain
    double floor_high_w_per_hz = 0.0;
    double delta_db = 0.0;
};

/// Signal-blocked floor at factor*P versus P. Independent seed sets for the
/// two arms unless `paired`, in which case both arms reuse the same seeds.
DoublingResult doubling_check(const Scenario& base, double lo_power_w, NoiseHypothesis hyp, std::size_t n_seeds,
                              std::size_t n_averages = 200, double factor = 2.0, bool paired = false,
                              unsigned workers = 0);

// ---------------------------------------------------------------------------
// Reproductions of the published results

struct BandCheck {
    std::string name;
    double value = 0.0;
    double nominal = 0.0;
    double err_plus = 0.0;  ///< band is [nominal - err_minus, nominal + err_plus]
    double err_minus = 0.0;
    bool pass = false;
};

BandCheck check_band(std::string name, double value, double nominal, double err_plus, double err_minus);

struct ExperimentResult {
    std::string name;
    std::vector<NoiseFigureReport> rows;
    std::vector<double> oracle_delta_db; ///< MC SNR_out - analytic SNR_out, per row
    std::vector<BandCheck> checks;
    double gain = 0.0;
    double target_floor_dbm_per_hz = 0.0;
    std::optional<double> doubling_delta_db;

    bool all_pass() const;
};

/// Default bench: 2.0 mW BLO at 1064 nm, Omega/2pi = 1.3 MHz, eta = 0.7,
/// RBW = 1 kHz, calibrated gain, cancellation hypothesis, averaged phase.
Scenario default_scenario();

struct ReproduceOptions {
    std::size_t n_seeds = 100;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

ExperimentResult reproduce_table2(const ReproduceOptions& opts = {});

/// 0.5 nW, 2.0 mW BLO, locked phase, cancellation: the peak-fringe NF.
ExperimentResult reproduce_locked(const ReproduceOptions& opts = {});

struct FringeCurve {
    double p_s_w = 0.0;
    std::vector<double> phase_rad;  ///< ground-truth phi' at each window center
    std::vector<double> power_dbm;  ///< tone marker power per analyzer window
    double peak_dbm = 0.0;
    double null_dbm = 0.0;
};

struct Fig5Result {
    std::vector<FringeCurve> curves;
    ExperimentResult summary;
};

Fig5Result reproduce_fig5(const ReproduceOptions& opts = {}, double jitter_rms = 0.0, std::size_t n_windows = 128);

struct Fig6Result {
    PsdEstimate blocked_1mw;
    PsdEstimate blocked_2mw;
    PsdEstimate beatnote_1mw;
    double beat_hz = 0.0;
    ExperimentResult summary;
};

Fig6Result reproduce_fig6(const ReproduceOptions& opts = {});

// ---------------------------------------------------------------------------
// Output

std::string format_report_table(const ExperimentResult& r);
std::string to_json(const ExperimentResult& r, const std::vector<std::string>& header = {});
void write_fig5_csv(std::ostream& os, const Fig5Result& r, const std::vector<std::string>& header);
void write_fig6_csv(std::ostream& os, const Fig6Result& r, const std::vector<std::string>& header,
                    double halfspan_hz = 50e3);

} // namespace pipeline
} // namespace hetnoise
