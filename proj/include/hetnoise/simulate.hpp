#pragma once

// Seeded Monte Carlo synthesis of the differenced photocurrent J_-(t).
//
// A trace is the deterministic beat note plus zero-mean Gaussian shot noise
// whose one-sided density is the analytic P_n under the scenario's noise
// hypothesis. Noise is drawn in fixed-size segments, each from its own
// engine keyed by (seed, segment index), so the output never depends on the
// number of worker threads.

#include "hetnoise/model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hetnoise {

struct Scenario {
    SignalField sig;
    LocalOscillator lo;
    ImageBandSet images;
    PhaseConfig phases;
    DetectorConfig cfg;
    NoiseHypothesis hyp = NoiseHypothesis::VacuumCancellation;
    bool cyclostationary = false;
    double duration_s = 0.0;
    double sample_rate_hz = 0.0;
    std::uint64_t seed = 1;
    double dark_density_a2_per_hz = 0.0; ///< optional stationary floor, pre-gain

    /// Omega / 2pi.
    double beat_hz() const;
    bool is_bichromatic() const { return std::holds_alternative<BichromaticLo>(lo); }

    /// Throws config_error (or unsupported_error for squeezed BLO input) when
    /// the scenario cannot be simulated as stated.
    void validate() const;
};

/// Samples per noise segment; part of the reproducibility contract.
inline constexpr std::size_t kNoiseSegment = std::size_t{1} << 16;

/// Samples between points of the decimated phase-jitter walk.
inline constexpr std::size_t kJitterStride = 64;

/// Mean pre-gain noise density (W/Hz) the simulator injects, excluding any
/// phase-dependent squeezing factor.
double injected_noise_density(const Scenario& sc);

/// The constant phase a trace realizes in Averaged or Locked mode: phi' for a
/// bichromatic LO, phi for a mono LO. Averaged draws it uniformly from the seed.
double realized_phase(const Scenario& sc);

PhotocurrentTrace synth_trace(const Scenario& sc, unsigned workers = 0);

struct PhaseScanRecord {
    std::vector<double> t_s;
    std::vector<double> phase_rad;       ///< ground-truth phi'(t) (phi(t) for mono)
    std::vector<double> beat_amplitude_a; ///< instantaneous beat-note amplitude
};

struct PhaseScanResult {
    PhotocurrentTrace trace;
    PhaseScanRecord record;
};

/// Trace with a swept relative phase. Requires PhaseMode::Scanned and a scan
/// rate far below the beat frequency.
PhaseScanResult phase_scan_trace(const Scenario& sc, unsigned workers = 0, std::size_t record_stride = 1024);

} // namespace hetnoise
