#include "hetnoise/spectral.hpp"

#include <fftw3.h>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace hetnoise::spectral {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* input() { return in_; }
    const fftw_complex* output() const { return out_; }
    std::size_t bins() const { return n_ / 2 + 1; }
    void run() { fftw_execute(plan_); }

private:
    std::size_t n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> win(n, 1.0);
    if (w == Window::Hann) {
        // periodic form: ENBW is exactly 1.5 bins and bin-centered tones do not scallop
        for (std::size_t i = 0; i < n; ++i)
            win[i] = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(n));
    }
    return win;
}

// Accumulates one-sided periodogram densities of windowed segments.
class Periodogram {
public:
    Periodogram(const SegmentPlan& plan, double fs, double gain)
        : plan_(plan), fft_(plan.length), win_(make_window(plan.window, plan.length)) {
        double sum_sq = 0.0;
        for (double v : win_) sum_sq += v * v;
        scale_ = gain / (fs * sum_sq);
    }

    void add(const double* x, std::vector<double>& acc) {
        double* in = fft_.input();
        for (std::size_t i = 0; i < plan_.length; ++i) in[i] = x[i] * win_[i];
        fft_.run();
        const fftw_complex* out = fft_.output();
        const std::size_t nb = fft_.bins();
        acc.resize(nb, 0.0);
        for (std::size_t k = 0; k < nb; ++k) {
            double p = (out[k][0] * out[k][0] + out[k][1] * out[k][1]) * scale_;
            const bool edge = k == 0 || (plan_.length % 2 == 0 && k == nb - 1);
            if (!edge) p *= 2.0;
            acc[k] += p;
        }
    }

    PsdEstimate finish(std::vector<double> acc, std::size_t n_avg) const {
        PsdEstimate psd;
        for (double& v : acc) v /= static_cast<double>(n_avg);
        psd.density_w_per_hz = std::move(acc);
        psd.freq_bins_hz.resize(psd.density_w_per_hz.size());
        for (std::size_t k = 0; k < psd.freq_bins_hz.size(); ++k)
            psd.freq_bins_hz[k] = static_cast<double>(k) * plan_.bin_width_hz;
        psd.rbw_hz = plan_.rbw_hz;
        psd.bin_width_hz = plan_.bin_width_hz;
        psd.n_averages = n_avg;
        psd.window_name = window_name(plan_.window);
        return psd;
    }

private:
    SegmentPlan plan_;
    RealFft fft_;
    std::vector<double> win_;
    double scale_;
};

} // namespace

std::string window_name(Window w) { return w == Window::Hann ? "hann" : "rect"; }

Window parse_window(const std::string& name) {
    if (name == "hann") return Window::Hann;
    if (name == "rect") return Window::Rect;
    throw config_error("window: expected hann or rect, got '" + name + "'");
}

double window_enbw_bins(Window w) { return w == Window::Hann ? 1.5 : 1.0; }

SegmentPlan plan_segments(double sample_rate_hz, double rbw_hz, Window w) {
    if (!(rbw_hz > 0.0) || !(sample_rate_hz > 0.0)) throw config_error("rbw: must be positive");
    SegmentPlan p;
    p.window = w;
    p.length = static_cast<std::size_t>(std::llround(window_enbw_bins(w) * sample_rate_hz / rbw_hz));
    if (p.length < 8) throw config_error("rbw: too wide for the sample rate");
    p.hop = w == Window::Hann ? p.length / 2 : p.length;
    p.bin_width_hz = sample_rate_hz / static_cast<double>(p.length);
    p.rbw_hz = window_enbw_bins(w) * p.bin_width_hz;
    return p;
}

std::size_t required_samples(const SegmentPlan& plan, std::size_t n_averages) {
    if (n_averages == 0) return plan.length;
    return plan.length + (n_averages - 1) * plan.hop;
}

PsdEstimate psd_estimate(const PhotocurrentTrace& trace, double rbw_hz, std::size_t n_averages, Window w,
                         double gain) {
    const SegmentPlan plan = plan_segments(trace.sample_rate_hz, rbw_hz, w);
    const std::size_t have = trace.samples.size();
    if (n_averages == 0) n_averages = have >= plan.length ? (have - plan.length) / plan.hop + 1 : 0;
    const std::size_t need = required_samples(plan, std::max<std::size_t>(n_averages, 1));
    if (n_averages == 0 || have < need) {
        throw config_error("duration: " + std::to_string(std::max<std::size_t>(n_averages, 1)) +
                           " averages at rbw " + std::to_string(plan.rbw_hz) + " Hz need " +
                           std::to_string(static_cast<double>(need) / trace.sample_rate_hz) + " s of trace");
    }

    Periodogram pg(plan, trace.sample_rate_hz, gain);
    std::vector<double> acc;
    for (std::size_t s = 0; s < n_averages; ++s) pg.add(trace.samples.data() + s * plan.hop, acc);
    return pg.finish(std::move(acc), n_averages);
}

std::vector<PsdEstimate> consecutive_periodograms(const PhotocurrentTrace& trace, double rbw_hz, Window w,
                                                  double gain) {
    const SegmentPlan plan = plan_segments(trace.sample_rate_hz, rbw_hz, w);
    const std::size_t count = trace.samples.size() / plan.length;
    if (count == 0) {
        throw config_error("duration: one analyzer window at rbw " + std::to_string(plan.rbw_hz) + " Hz needs " +
                           std::to_string(static_cast<double>(plan.length) / trace.sample_rate_hz) + " s of trace");
    }
    Periodogram pg(plan, trace.sample_rate_hz, gain);
    std::vector<PsdEstimate> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<double> acc;
        pg.add(trace.samples.data() + s * plan.length, acc);
        out.push_back(pg.finish(std::move(acc), 1));
    }
    return out;
}

double band_power_w(const PsdEstimate& psd, double f_center_hz, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::domain_error("band_power: bandwidth must be positive");
    if (psd.freq_bins_hz.empty()) throw std::out_of_range("band_power: empty spectrum");
    const double df = psd.bin_width_hz;
    const double lo = f_center_hz - bandwidth_hz / 2.0;
    const double hi = f_center_hz + bandwidth_hz / 2.0;
    if (lo < 0.0 || hi > psd.freq_bins_hz.back() + df / 2.0)
        throw std::out_of_range("band_power: band lies outside the spectrum span");

    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(lo / df - 0.5)));
    const auto last = std::min(psd.freq_bins_hz.size() - 1, static_cast<std::size_t>(std::ceil(hi / df + 0.5)));
    double power = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        const double b_lo = psd.freq_bins_hz[k] - df / 2.0;
        const double b_hi = psd.freq_bins_hz[k] + df / 2.0;
        const double overlap = std::min(hi, b_hi) - std::max(lo, b_lo);
        if (overlap > 0.0) power += psd.density_w_per_hz[k] * overlap;
    }
    return power;
}

double band_power_dbm(const PsdEstimate& psd, double f_center_hz, double bandwidth_hz) {
    return watts_to_dbm(band_power_w(psd, f_center_hz, bandwidth_hz));
}

double floor_density(const PsdEstimate& psd, double f_center_hz, double halfspan_hz, double exclude_halfwidth_hz) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < psd.freq_bins_hz.size(); ++k) {
        const double d = std::abs(psd.freq_bins_hz[k] - f_center_hz);
        if (d <= halfspan_hz && d > exclude_halfwidth_hz) {
            sum += psd.density_w_per_hz[k];
            ++n;
        }
    }
    if (n == 0) throw std::out_of_range("floor_density: no bins in the requested span");
    return sum / static_cast<double>(n);
}

double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

namespace {

std::pair<std::size_t, std::size_t> span_indices(const PsdEstimate& psd, double f_lo, double f_hi) {
    std::size_t a = 0, b = psd.freq_bins_hz.size();
    if (f_hi > f_lo) {
        const double tol = 1e-3 * psd.bin_width_hz;
        a = std::lower_bound(psd.freq_bins_hz.begin(), psd.freq_bins_hz.end(), f_lo - tol) - psd.freq_bins_hz.begin();
        b = std::upper_bound(psd.freq_bins_hz.begin(), psd.freq_bins_hz.end(), f_hi + tol) - psd.freq_bins_hz.begin();
    }
    return {a, b};
}

} // namespace

void write_psd_csv(std::ostream& os, const PsdEstimate& psd, const std::vector<std::string>& header, double f_lo,
                   double f_hi) {
    for (const auto& h : header) os << "# " << h << '\n';
    os << "# rbw_hz=" << psd.rbw_hz << "\n# n_averages=" << psd.n_averages << "\n# window=" << psd.window_name
       << "\nfreq_hz,dbm_per_hz\n";
    const auto [a, b] = span_indices(psd, f_lo, f_hi);
    os.precision(10);
    for (std::size_t k = a; k < b; ++k)
        os << psd.freq_bins_hz[k] << ',' << density_dbm_per_hz(psd.density_w_per_hz[k]) << '\n';
}

void write_psd_json(std::ostream& os, const PsdEstimate& psd, const std::vector<std::string>& header, double f_lo,
                    double f_hi) {
    nlohmann::json j;
    j["header"] = header;
    j["rbw_hz"] = psd.rbw_hz;
    j["bin_width_hz"] = psd.bin_width_hz;
    j["n_averages"] = psd.n_averages;
    j["window"] = psd.window_name;
    const auto [a, b] = span_indices(psd, f_lo, f_hi);
    std::vector<double> f(psd.freq_bins_hz.begin() + a, psd.freq_bins_hz.begin() + b);
    std::vector<double> dbm;
    dbm.reserve(b - a);
    for (std::size_t k = a; k < b; ++k) dbm.push_back(density_dbm_per_hz(psd.density_w_per_hz[k]));
    j["freq_hz"] = f;
    j["dbm_per_hz"] = dbm;
    os << j.dump(1) << '\n';
}

} // namespace hetnoise::spectral
