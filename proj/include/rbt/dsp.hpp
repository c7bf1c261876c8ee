#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "rbt/errors.hpp"
#include "rbt/fft.hpp"
#include "rbt/radar.hpp"

namespace rbt::dsp {

/// Per-range-bin spectrum across frames. Row n holds the Doppler spectrum of
/// range bin n; a reflector toggling at f peaks at Doppler bin
/// round(f * P / frame_rate).
struct RangeDopplerImage {
    std::size_t range_bins = 0;   // N
    std::size_t doppler_bins = 0; // S = P of the source capture
    double frame_rate_hz = 0.0;
    std::vector<std::complex<double>> data; // row-major, N rows x S cols

    double doppler_res_hz() const { return frame_rate_hz / static_cast<double>(doppler_bins); }

    std::complex<double>& at(std::size_t range_bin, std::size_t doppler_bin) {
        return data[range_bin * doppler_bins + doppler_bin];
    }
    const std::complex<double>& at(std::size_t range_bin, std::size_t doppler_bin) const {
        return data[range_bin * doppler_bins + doppler_bin];
    }
};

enum class Window { kRect, kHann };

/// Inverse DFT of each range bin across frames, zero-based with 1/P scaling
/// (1/sum(w) under a Hann window so a coherent line keeps its amplitude):
///   R[n,s] = (1/P) * sum_m r_m[n] * e^{+j*2*pi*m*s/P}
inline RangeDopplerImage range_doppler(const radar::FrameCapture& capture,
                                       Window window = Window::kRect) {
    if (capture.frame_count < 2) throw ValidationError("range_doppler: need at least 2 frames");
    capture.validate();
    const std::size_t frames = capture.frame_count;
    const std::size_t bins = capture.bin_count;

    std::vector<double> weights(frames, 1.0);
    if (window == Window::kHann)
        for (std::size_t m = 0; m < frames; ++m)
            weights[m] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(m) /
                                               static_cast<double>(frames - 1)));
    double weight_sum = 0.0;
    for (double w : weights) weight_sum += w;

    RangeDopplerImage image;
    image.range_bins = bins;
    image.doppler_bins = frames;
    image.frame_rate_hz = capture.config.frame_rate_hz;
    image.data.resize(bins * frames);

    fft::Plan plan(frames);
    std::vector<std::complex<double>> column(frames);
    const double scale = 1.0 / weight_sum;
    for (std::size_t n = 0; n < bins; ++n) {
        for (std::size_t m = 0; m < frames; ++m) column[m] = capture.at(m, n) * weights[m];
        plan.execute(column.data(), +1);
        for (std::size_t s = 0; s < frames; ++s) image.data[n * frames + s] = column[s] * scale;
    }
    return image;
}

/// Doppler bin index of frequency f: round(f * P / frame_rate) mod P.
inline std::size_t doppler_bin_for_freq(double f, double frame_rate_hz, std::size_t doppler_bins) {
    if (!(f >= 0.0) || !std::isfinite(f))
        throw ValidationError("doppler_bin_for_freq: f must be finite and >= 0");
    if (f >= frame_rate_hz)
        throw ValidationError("doppler_bin_for_freq: f must be below the frame rate");
    const auto s = static_cast<std::size_t>(
        std::llround(f * static_cast<double>(doppler_bins) / frame_rate_hz));
    return s % doppler_bins;
}

/// Magnitude of the Doppler column at the tag frequency, one value per range
/// bin. With combine_mirror the conjugate-symmetric image column is summed
/// coherently first (real on/off keying splits its energy across both).
inline std::vector<double> extract_tag_vector(const RangeDopplerImage& image, double f_tag,
                                              bool combine_mirror = false) {
    if (!(f_tag < image.frame_rate_hz / 2.0))
        throw ValidationError("extract_tag_vector: tag frequency must be below Nyquist");
    const std::size_t s = doppler_bin_for_freq(f_tag, image.frame_rate_hz, image.doppler_bins);
    const std::size_t mirror = s == 0 ? 0 : image.doppler_bins - s;
    std::vector<double> vec(image.range_bins);
    for (std::size_t n = 0; n < image.range_bins; ++n) {
        if (combine_mirror && mirror != s)
            vec[n] = std::abs(image.at(n, s) + std::conj(image.at(n, mirror)));
        else
            vec[n] = std::abs(image.at(n, s));
    }
    return vec;
}

/// Inclusive range-bin search window; geometry hints from the measurement
/// chain narrow the peak search to plausible tag locations.
struct DetectionWindow {
    std::size_t min_bin = 0;
    std::size_t max_bin = std::numeric_limits<std::size_t>::max();
};

struct DetectionOptions {
    double threshold_db = 10.0;
    std::size_t peak_guard_bins = 3;    // range bins excluded around the peak
    std::size_t doppler_guard_bins = 2; // Doppler bins excluded around DC / tag / mirror
    bool combine_mirror = false;
};

struct DetectionResult {
    std::size_t range_bin = 0; // peak range bin b_r (integer)
    double refined_bin = 0.0;  // sub-bin interpolated peak position
    std::size_t doppler_bin = 0;
    double snr_db = 0.0;
    bool detected = false;
    double noise_floor = 0.0; // linear power
};

namespace detail {

/// Three-point parabolic interpolation on log magnitude. Exact for a
/// Gaussian envelope; offset clamped to +-0.5 bins.
inline double parabolic_refine(const std::vector<double>& mag, std::size_t peak) {
    const double ctr = static_cast<double>(peak);
    if (peak == 0 || peak + 1 >= mag.size()) return ctr;
    if (!(mag[peak - 1] > 0.0) || !(mag[peak] > 0.0) || !(mag[peak + 1] > 0.0)) return ctr;
    const double l = std::log(mag[peak - 1]);
    const double c = std::log(mag[peak]);
    const double r = std::log(mag[peak + 1]);
    const double denom = l - 2.0 * c + r;
    if (!(denom < 0.0)) return ctr;
    const double offset = 0.5 * (l - r) / denom;
    return ctr + std::clamp(offset, -0.5, 0.5);
}

/// Noise power estimate from the image region that carries neither the DC
/// clutter ridge, the tag line (and its mirror), nor the peak's own range
/// bins. Median of per-cell power, scaled by 1/ln(2) to be unbiased for
/// exponentially distributed noise power. The median over thousands of
/// cells keeps the estimator variance low enough for a stable false-alarm
/// rate at the detection threshold.
inline double noise_floor_power(const RangeDopplerImage& image, std::size_t lo, std::size_t hi,
                                std::size_t peak, std::size_t s_tag,
                                const DetectionOptions& opt) {
    const std::size_t S = image.doppler_bins;
    const std::size_t mirror = s_tag == 0 ? 0 : S - s_tag;
    const std::size_t g = opt.doppler_guard_bins;
    std::vector<double> sample;
    sample.reserve((hi - lo + 1) * S / 2);
    for (std::size_t n = lo; n <= hi; ++n) {
        if (n + opt.peak_guard_bins >= peak && n <= peak + opt.peak_guard_bins) continue;
        for (std::size_t s = 0; s < S; ++s) {
            if (s <= g || s + g >= S) continue; // DC ridge and its wrap-around
            const std::size_t d_tag = s > s_tag ? s - s_tag : s_tag - s;
            const std::size_t d_mir = s > mirror ? s - mirror : mirror - s;
            if (d_tag <= g || d_mir <= g) continue;
            sample.push_back(std::norm(image.at(n, s)));
        }
    }
    if (sample.empty()) return 0.0;
    const std::size_t mid = sample.size() / 2;
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(mid),
                     sample.end());
    return sample[mid] / std::log(2.0);
}

} // namespace detail

/// Peak search over the tag-frequency vector within the allowed window.
/// Detected iff the peak power clears the noise floor by threshold_db.
inline DetectionResult detect_tag(const RangeDopplerImage& image, double f_tag,
                                  DetectionWindow window = {}, DetectionOptions options = {}) {
    if (image.range_bins == 0 || image.doppler_bins == 0)
        throw ValidationError("detect_tag: empty image");
    const std::size_t lo = std::min(window.min_bin, image.range_bins - 1);
    const std::size_t hi = std::min(window.max_bin, image.range_bins - 1);
    if (lo > hi) throw ValidationError("detect_tag: empty search window");

    const auto vec = extract_tag_vector(image, f_tag, options.combine_mirror);
    std::size_t peak = lo;
    for (std::size_t n = lo; n <= hi; ++n)
        if (vec[n] > vec[peak]) peak = n;
    if (!(vec[peak] > 0.0)) throw ValidationError("detect_tag: all-zero tag-frequency vector");

    const std::size_t s_tag =
        doppler_bin_for_freq(f_tag, image.frame_rate_hz, image.doppler_bins);
    const double floor = detail::noise_floor_power(image, lo, hi, peak, s_tag, options);
    const double peak_power = vec[peak] * vec[peak];

    DetectionResult result;
    result.range_bin = peak;
    result.doppler_bin = s_tag;
    result.noise_floor = floor;
    result.snr_db = floor > 0.0 ? 10.0 * std::log10(peak_power / floor)
                                : std::numeric_limits<double>::infinity();
    result.detected = result.snr_db >= options.threshold_db;
    result.refined_bin = detail::parabolic_refine(vec, peak);
    return result;
}

} // namespace rbt::dsp
