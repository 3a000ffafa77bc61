#pragma once

// Spectrum-analyzer emulation: averaged periodograms whose resolution
// bandwidth is the equivalent noise bandwidth of the window, band-power
// markers and dBm conversion.

#include "hetnoise/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hetnoise::spectral {

enum class Window { Hann, Rect };

std::string window_name(Window w);
Window parse_window(const std::string& name);

/// Equivalent noise bandwidth of the window in bins.
double window_enbw_bins(Window w);

struct SegmentPlan {
    std::size_t length = 0; ///< samples per segment
    std::size_t hop = 0;    ///< 50% overlap for Hann, none for Rect
    double bin_width_hz = 0.0;
    double rbw_hz = 0.0;    ///< realized equivalent noise bandwidth
    Window window = Window::Hann;
};

SegmentPlan plan_segments(double sample_rate_hz, double rbw_hz, Window w);

/// Samples needed for n_averages segments under the plan.
std::size_t required_samples(const SegmentPlan& plan, std::size_t n_averages);

/// One-sided PSD in W/Hz after the electronic power gain. n_averages = 0 uses
/// every full segment the trace holds. Throws config_error, naming the
/// required duration, when the trace is too short.
PsdEstimate psd_estimate(const PhotocurrentTrace& trace, double rbw_hz, std::size_t n_averages,
                         Window w = Window::Hann, double gain = 1.0);

/// Single-segment periodograms over consecutive, non-overlapping windows.
/// This is a swept analyzer's trace-by-trace view of a slowly varying signal.
std::vector<PsdEstimate> consecutive_periodograms(const PhotocurrentTrace& trace, double rbw_hz, Window w,
                                                  double gain = 1.0);

/// Integrated power over [f_center - bw/2, f_center + bw/2], each bin counted
/// by its fractional overlap. Throws std::domain_error for a non-positive
/// width and std::out_of_range when the band leaves the spectrum.
double band_power_w(const PsdEstimate& psd, double f_center_hz, double bandwidth_hz);
double band_power_dbm(const PsdEstimate& psd, double f_center_hz, double bandwidth_hz);

/// Mean density over bins with |f - f_center| <= halfspan, skipping bins with
/// |f - f_center| <= exclude_halfwidth. Used to read a noise floor beside a tone.
double floor_density(const PsdEstimate& psd, double f_center_hz, double halfspan_hz, double exclude_halfwidth_hz);

double watts_to_dbm(double w);
double dbm_to_watts(double dbm);

/// Density in dBm/Hz.
inline double density_dbm_per_hz(double w_per_hz) { return watts_to_dbm(w_per_hz); }

/// CSV with `# key=value` header lines followed by freq_hz,dbm_per_hz rows,
/// restricted to [f_lo, f_hi] when f_hi > f_lo.
void write_psd_csv(std::ostream& os, const PsdEstimate& psd, const std::vector<std::string>& header,
                   double f_lo = 0.0, double f_hi = 0.0);
void write_psd_json(std::ostream& os, const PsdEstimate& psd, const std::vector<std::string>& header,
                    double f_lo = 0.0, double f_hi = 0.0);

} // namespace hetnoise::spectral
