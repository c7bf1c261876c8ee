#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rbt/constants.hpp"
#include "rbt/dsp.hpp"
#include "rbt/errors.hpp"
#include "rbt/polyfit.hpp"
#include "rbt/soil.hpp"
#include "rbt/tag.hpp"

namespace rbt::moisture {

/// Ranging geometry of one measurement: radar-to-surface distance, burial
/// depth, and the radar's range resolution.
struct MeasurementGeometry {
    double d_air_m = 1.0;
    double d_soil_m = 0.30;
    double range_res_m = 0.05;

    void validate() const {
        if (!(d_air_m > 0.0) || !(range_res_m > 0.0))
            throw ValidationError("MeasurementGeometry: d_air and range_res must be > 0");
        if (!(d_soil_m >= 0.0))
            throw ValidationError("MeasurementGeometry: d_soil must be >= 0");
    }
};

/// Cubic theta(Ka) map, either Topp's general equation or a soil-specific
/// gravimetric fit. Evaluation clamps to the physical range [0, 1].
struct CalibrationCurve {
    std::array<double, 4> coefficients = soil::kToppCoefficients; // constant-first
    double fit_rmse = 0.0;
    int n_points = 0;
    double ka_min = 1.0; // fit region, used for the Saturated flag
    double ka_max = 40.0;

    static CalibrationCurve topp() { return CalibrationCurve{}; }

    double evaluate(double ka) const {
        const double theta = soil::evaluate_cubic(coefficients, ka);
        return std::fmin(std::fmax(theta, 0.0), 1.0);
    }
};

enum EstimateFlag : unsigned {
    kLowSnr = 1u << 0,
    kNegativeDelta = 1u << 1,
    kSaturated = 1u << 2,
};

enum class KaMode { kExact, kPaperApprox };

inline const char* ka_mode_name(KaMode m) {
    return m == KaMode::kExact ? "exact" : "paper";
}

struct MoistureEstimate {
    double delta_tof_s = std::numeric_limits<double>::quiet_NaN();
    double ka = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> theta;
    double snr_db = 0.0;
    double expected_bin = 0.0; // b_T
    double measured_bin = 0.0; // fractional b_r
    unsigned flags = 0;
    KaMode mode = KaMode::kExact;

    bool has(EstimateFlag f) const { return (flags & f) != 0; }

    std::vector<std::string> flag_names() const {
        std::vector<std::string> names;
        if (has(kLowSnr)) names.push_back("LowSnr");
        if (has(kNegativeDelta)) names.push_back("NegativeDelta");
        if (has(kSaturated)) names.push_back("Saturated");
        return names;
    }
};

/// Distance to the first static echo: scans the DC Doppler profile outward
/// from the radar and returns the first local maximum that clears the
/// profile's median power by `prominence_db`, sub-bin refined.
inline double surface_distance(const radar::FrameCapture& capture, double prominence_db = 12.0) {
    capture.validate();
    const std::size_t frames = capture.frame_count;
    const std::size_t bins = capture.bin_count;
    std::vector<double> dc(bins, 0.0);
    for (std::size_t n = 0; n < bins; ++n) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t m = 0; m < frames; ++m) acc += capture.at(m, n);
        dc[n] = std::abs(acc) / static_cast<double>(frames);
    }

    std::vector<double> power(bins);
    for (std::size_t n = 0; n < bins; ++n) power[n] = dc[n] * dc[n];
    std::vector<double> sorted = power;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(bins / 2),
                     sorted.end());
    const double floor = sorted[bins / 2];
    const double threshold = floor * std::pow(10.0, prominence_db / 10.0);

    for (std::size_t n = 0; n < bins; ++n) {
        const bool rises = n == 0 || dc[n] >= dc[n - 1];
        const bool falls = n + 1 == bins || dc[n] >= dc[n + 1];
        if (rises && falls && power[n] > threshold && power[n] > 0.0) {
            const double refined = dsp::detail::parabolic_refine(dc, n);
            return capture.config.range_start_m + refined * capture.config.range_res_m;
        }
    }
    throw ValidationError("surface_distance: no surface echo above the noise floor");
}

/// Range bin the tag would occupy with no soil on top:
/// b_T = (d_air + d_soil) / range_res, fractional.
inline double expected_bin(const MeasurementGeometry& geom) {
    geom.validate();
    return (geom.d_air_m + geom.d_soil_m) / geom.range_res_m;
}

/// Excess one-way travel time caused by the soil: (b_r - b_T) * range_res / c.
/// May be negative; callers flag or reject that.
inline double delta_tof(double measured_bin, double expected_bin, double range_res_m) {
    return (measured_bin - expected_bin) * range_res_m / kSpeedOfLight;
}

inline constexpr double kDefaultNegativeTolerance = 0.05 / (2.0 * kSpeedOfLight);

/// Apparent permittivity from the soil-induced ToF excess.
///
/// kExact inverts delta_tof = d*(sqrt(Ka) - 1)/c, so delta=0 gives Ka=1;
/// kPaperApprox uses Ka = (c*delta/d)^2, which is only meaningful for large
/// Ka (it maps delta=0 to the unphysical Ka=0) and is kept for comparison.
/// Small negatives within `neg_tolerance_s` (half a range bin of travel
/// time) clamp to the dry-soil value; anything more negative is an error
/// signalling wrong geometry inputs.
inline double ka_from_delta_tof(double dtof_s, double d_soil_m, KaMode mode = KaMode::kExact,
                                double neg_tolerance_s = kDefaultNegativeTolerance) {
    if (!(d_soil_m > 0.0)) throw ValidationError("ka_from_delta_tof: d_soil must be > 0");
    if (!std::isfinite(dtof_s)) throw ValidationError("ka_from_delta_tof: non-finite delta");
    if (dtof_s < -neg_tolerance_s)
        throw ValidationError("ka_from_delta_tof: negative ToF delta beyond tolerance");
    const double clamped = std::fmax(dtof_s, 0.0);
    const double stretch = kSpeedOfLight * clamped / d_soil_m;
    if (mode == KaMode::kPaperApprox) return stretch * stretch;
    return (1.0 + stretch) * (1.0 + stretch);
}

struct EstimateOptions {
    KaMode mode = KaMode::kExact;
    double threshold_db = 10.0;
    bool combine_mirror = false;
};

/// Full measurement chain: isolate the tag in the range-Doppler domain, take
/// the bin offset against the no-soil expectation, invert to Ka, and map to
/// volumetric water content through the calibration curve.
inline MoistureEstimate estimate_vwc(const radar::FrameCapture& capture,
                                     const tags::TagConfig& tag,
                                     const MeasurementGeometry& geom,
                                     const CalibrationCurve& curve = CalibrationCurve::topp(),
                                     const EstimateOptions& options = {}) {
    geom.validate();
    tag.validate_against(capture.config);
    const auto& config = capture.config;

    const auto image = dsp::range_doppler(capture);

    // Search between the no-soil bin and the saturated-soil extreme
    // (sqrt(Ka) up to 9), with a small guard either side.
    const double r = config.range_res_m;
    const double lo_d = geom.d_air_m + geom.d_soil_m - config.range_start_m;
    const double hi_d = geom.d_air_m + 9.0 * geom.d_soil_m - config.range_start_m;
    const auto n_bins = static_cast<double>(capture.bin_count);
    dsp::DetectionWindow window;
    window.min_bin = static_cast<std::size_t>(std::fmax(0.0, std::floor(lo_d / r) - 2.0));
    window.max_bin =
        static_cast<std::size_t>(std::fmin(n_bins - 1.0, std::ceil(hi_d / r) + 2.0));

    dsp::DetectionOptions det_options;
    det_options.threshold_db = options.threshold_db;
    det_options.combine_mirror = options.combine_mirror;
    const auto det = dsp::detect_tag(image, tag.osc_freq_hz, window, det_options);

    MoistureEstimate est;
    est.mode = options.mode;
    est.snr_db = det.snr_db;
    est.expected_bin = expected_bin(geom);
    est.measured_bin = config.range_start_m / r + det.refined_bin;

    if (!det.detected) {
        est.flags |= kLowSnr;
        return est;
    }

    est.delta_tof_s = delta_tof(est.measured_bin, est.expected_bin, r);
    const double neg_tol = r / (2.0 * kSpeedOfLight);
    est.ka = ka_from_delta_tof(est.delta_tof_s, geom.d_soil_m, options.mode, neg_tol);
    if (est.delta_tof_s < 0.0) est.flags |= kNegativeDelta;
    if (est.ka > curve.ka_max) est.flags |= kSaturated;
    est.theta = curve.evaluate(est.ka);
    return est;
}

/// Gravimetric calibration: least-squares cubic theta(Ka) over oven-dried
/// ground-truth pairs. Needs at least 4 points with real spread in Ka.
inline CalibrationCurve fit_calibration(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 4)
        throw ValidationError("fit_calibration: insufficient points (need >= 4)");
    std::vector<double> ka(pairs.size()), theta(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!std::isfinite(pairs[i].first) || !std::isfinite(pairs[i].second))
            throw ValidationError("fit_calibration: non-finite input pair");
        ka[i] = pairs[i].first;
        theta[i] = pairs[i].second;
    }
    const auto fit = numeric::polyfit(ka, theta, 3);

    CalibrationCurve curve;
    for (std::size_t i = 0; i < 4; ++i) curve.coefficients[i] = fit.coefficients[i];
    curve.fit_rmse = fit.rmse;
    curve.n_points = static_cast<int>(pairs.size());
    curve.ka_min = *std::min_element(ka.begin(), ka.end());
    curve.ka_max = *std::max_element(ka.begin(), ka.end());
    return curve;
}

} // namespace rbt::moisture
