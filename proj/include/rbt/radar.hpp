#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "rbt/constants.hpp"
#include "rbt/errors.hpp"
#include "rbt/rng.hpp"

namespace rbt::radar {

/// UWB impulse radar parameters. The pulse repetition interval of interest
/// here is the inter-frame interval 1/frame_rate; one synthetic pulse is
/// modeled per frame, with integration gain folded into noise_sigma.
struct RadarConfig {
    double center_freq_hz = 1.5e9;
    double bandwidth_hz = 3.0e9;
    double frame_rate_hz = 200.0;
    double range_start_m = 0.0;
    double range_end_m = 4.0;
    double range_res_m = 0.05; // c / (2 * bandwidth) for a 3 GHz chirp
    double tx_amplitude = 1.0;
    double noise_sigma = 0.05; // per-sample complex noise std

    double pri_s() const { return 1.0 / frame_rate_hz; }
    double wavelength_m() const { return kSpeedOfLight / center_freq_hz; }
    /// Two-way sampling period matching one range bin.
    double bin_time_s() const { return 2.0 * range_res_m / kSpeedOfLight; }

    std::size_t bin_count() const {
        return static_cast<std::size_t>(std::ceil((range_end_m - range_start_m) / range_res_m));
    }

    void validate() const {
        if (!(center_freq_hz > 0.0)) throw ValidationError("RadarConfig: center_freq_hz must be > 0");
        if (!(bandwidth_hz > 0.0)) throw ValidationError("RadarConfig: bandwidth_hz must be > 0");
        if (!(frame_rate_hz > 0.0)) throw ValidationError("RadarConfig: frame_rate_hz must be > 0");
        if (!(range_start_m >= 0.0)) throw ValidationError("RadarConfig: range_start_m must be >= 0");
        if (!(range_end_m > range_start_m))
            throw ValidationError("RadarConfig: range_end_m must exceed range_start_m");
        if (!(range_res_m > 0.0)) throw ValidationError("RadarConfig: range_res_m must be > 0");
        if (!(noise_sigma >= 0.0)) throw ValidationError("RadarConfig: noise_sigma must be >= 0");
        if (bin_count() < 1) throw ValidationError("RadarConfig: sensing window yields no bins");
    }
};

/// Transmit pulse evaluated as a complex analytic signal with unit peak:
/// envelope(t) * e^{j*2*pi*fc*t}. The envelope is truncated at support() so
/// bins far from an echo are exactly zero.
struct PulseShape {
    enum class Model { kGaussianModulated, kIdealSinc };

    Model model = Model::kGaussianModulated;
    double envelope_sigma_s = 0.0; // Gaussian envelope std
    double sinc_bandwidth_hz = 0.0;

    /// Gaussian-modulated sinusoid whose envelope's two-sided -10 dB power
    /// bandwidth equals `bandwidth_hz`.
    static PulseShape gaussian_for_bandwidth(double bandwidth_hz) {
        if (!(bandwidth_hz > 0.0)) throw ValidationError("PulseShape: bandwidth must be > 0");
        PulseShape p;
        p.model = Model::kGaussianModulated;
        p.envelope_sigma_s = std::sqrt(std::log(10.0)) / (kPi * bandwidth_hz);
        return p;
    }

    static PulseShape ideal_sinc(double bandwidth_hz) {
        if (!(bandwidth_hz > 0.0)) throw ValidationError("PulseShape: bandwidth must be > 0");
        PulseShape p;
        p.model = Model::kIdealSinc;
        p.sinc_bandwidth_hz = bandwidth_hz;
        return p;
    }

    /// Truncation half-width in seconds.
    double support_s() const {
        return model == Model::kGaussianModulated ? 6.0 * envelope_sigma_s
                                                  : 12.0 / sinc_bandwidth_hz;
    }

    double envelope(double t) const {
        if (std::abs(t) > support_s()) return 0.0;
        if (model == Model::kGaussianModulated)
            return std::exp(-t * t / (2.0 * envelope_sigma_s * envelope_sigma_s));
        if (t == 0.0) return 1.0;
        const double x = kPi * sinc_bandwidth_hz * t;
        return std::sin(x) / x;
    }

    std::complex<double> evaluate(double t, double carrier_hz) const {
        const double env = envelope(t);
        if (env == 0.0) return {0.0, 0.0};
        return std::polar(env, 2.0 * kPi * carrier_hz * t);
    }
};

struct Static {};

/// {0,1} square-wave on/off keying of the reflection.
struct OnOffSquare {
    double freq_hz = 80.0;
    double duty = 0.5;
    double phase_rad = 0.0;
};

/// Constant radial velocity; per-frame carrier phase advance 2*pi*2*v*PRI/lambda.
struct LinearVelocity {
    double speed_mps = 0.0;
};

using Modulation = std::variant<Static, OnOffSquare, LinearVelocity>;

/// One point echo in the scene. `distance_m` is the apparent one-way
/// distance after any medium stretching applied by the scenario builder.
struct Reflector {
    double distance_m = 0.0;
    std::complex<double> amplitude = {1.0, 0.0};
    Modulation modulation = Static{};
};

using Scene = std::vector<Reflector>;

/// P x N complex capture, frame-major, plus the config and provenance that
/// produced it.
struct FrameCapture {
    RadarConfig config;
    std::size_t frame_count = 0; // P
    std::size_t bin_count = 0;   // N
    std::vector<std::complex<double>> samples; // frame-major
    double t0_s = 0.0;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> annotations;

    std::complex<double>& at(std::size_t frame, std::size_t bin) {
        return samples[frame * bin_count + bin];
    }
    const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
        return samples[frame * bin_count + bin];
    }

    void validate() const {
        if (frame_count < 1) throw ValidationError("FrameCapture: needs at least one frame");
        if (bin_count != config.bin_count())
            throw ValidationError("FrameCapture: bin count does not match config");
        if (samples.size() != frame_count * bin_count)
            throw ValidationError("FrameCapture: sample buffer size mismatch");
        for (const auto& s : samples)
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw ValidationError("FrameCapture: non-finite sample");
    }
};

/// Zero-based index of the range bin covering distance d:
/// n = floor((d - range_start) / range_res).
inline std::size_t bin_of_distance(const RadarConfig& config, double d) {
    config.validate();
    if (!std::isfinite(d) || d < config.range_start_m || d >= config.range_end_m)
        throw ValidationError("bin_of_distance: distance outside sensing window");
    return static_cast<std::size_t>(std::floor((d - config.range_start_m) / config.range_res_m));
}

/// Center distance of range bin n (inverse of bin_of_distance).
inline double distance_of_bin(const RadarConfig& config, std::size_t n) {
    if (n >= config.bin_count()) throw ValidationError("distance_of_bin: bin out of range");
    return config.range_start_m + (static_cast<double>(n) + 0.5) * config.range_res_m;
}

namespace detail {

/// Per-reflector data that is constant across frames: the complex bin
/// profile tx_amplitude * alpha * p((n - n_center) * T) over the pulse
/// support, so each frame costs one modulation evaluation plus a short
/// multiply-accumulate.
struct CompiledReflector {
    std::ptrdiff_t first_bin = 0;
    std::vector<std::complex<double>> profile;
    Modulation modulation;
};

struct CompiledScene {
    std::vector<CompiledReflector> reflectors;
    std::size_t bin_count = 0;
};

inline CompiledScene compile_scene(const RadarConfig& config, const PulseShape& pulse,
                                   const Scene& scene) {
    config.validate();
    CompiledScene out;
    out.bin_count = config.bin_count();
    const double bin_t = config.bin_time_s();
    const auto support_bins =
        static_cast<std::ptrdiff_t>(std::ceil(pulse.support_s() / bin_t));
    for (const auto& r : scene) {
        if (!std::isfinite(r.distance_m) || r.distance_m < config.range_start_m ||
            r.distance_m >= config.range_end_m)
            throw ValidationError("Reflector: distance outside sensing window");
        if (const auto* ook = std::get_if<OnOffSquare>(&r.modulation)) {
            if (!(ook->duty > 0.0 && ook->duty < 1.0))
                throw ValidationError("OnOffSquare: duty must be in (0,1)");
            if (!(ook->freq_hz > 0.0)) throw ValidationError("OnOffSquare: freq must be > 0");
        }
        CompiledReflector cr;
        cr.modulation = r.modulation;
        const double frac_center = (r.distance_m - config.range_start_m) / config.range_res_m;
        const auto lo = std::max<std::ptrdiff_t>(
            0, static_cast<std::ptrdiff_t>(std::floor(frac_center)) - support_bins);
        const auto hi = std::min<std::ptrdiff_t>(
            static_cast<std::ptrdiff_t>(out.bin_count) - 1,
            static_cast<std::ptrdiff_t>(std::ceil(frac_center)) + support_bins);
        if (lo > hi) continue;
        cr.first_bin = lo;
        cr.profile.resize(static_cast<std::size_t>(hi - lo + 1));
        for (std::ptrdiff_t n = lo; n <= hi; ++n) {
            const double t = (static_cast<double>(n) - frac_center) * bin_t;
            cr.profile[static_cast<std::size_t>(n - lo)] =
                config.tx_amplitude * r.amplitude * pulse.evaluate(t, config.center_freq_hz);
        }
        out.reflectors.push_back(std::move(cr));
    }
    return out;
}

inline std::complex<double> modulation_gain(const Modulation& mod, std::size_t frame,
                                            const RadarConfig& config, double t0) {
    if (std::holds_alternative<Static>(mod)) return {1.0, 0.0};
    if (const auto* ook = std::get_if<OnOffSquare>(&mod)) {
        const double t = t0 + static_cast<double>(frame) * config.pri_s();
        const double cycles = ook->freq_hz * t + ook->phase_rad / (2.0 * kPi);
        const double frac = cycles - std::floor(cycles);
        return frac < ook->duty ? std::complex<double>{1.0, 0.0} : std::complex<double>{0.0, 0.0};
    }
    const auto& lv = std::get<LinearVelocity>(mod);
    const double phase = -2.0 * kPi * 2.0 * lv.speed_mps * config.pri_s() *
                         static_cast<double>(frame) / config.wavelength_m();
    return std::polar(1.0, phase);
}

inline void synthesize_row(const CompiledScene& compiled, const RadarConfig& config,
                           std::size_t frame, double t0, SplitMix64& rng,
                           std::complex<double>* row) {
    for (std::size_t n = 0; n < compiled.bin_count; ++n) row[n] = {0.0, 0.0};
    for (const auto& cr : compiled.reflectors) {
        const auto gain = modulation_gain(cr.modulation, frame, config, t0);
        if (gain == std::complex<double>{0.0, 0.0}) continue;
        auto* dst = row + cr.first_bin;
        for (std::size_t i = 0; i < cr.profile.size(); ++i) dst[i] += gain * cr.profile[i];
    }
    if (config.noise_sigma > 0.0)
        for (std::size_t n = 0; n < compiled.bin_count; ++n)
            row[n] += rng.complex_gaussian(config.noise_sigma);
}

} // namespace detail

/// One frame of N complex range-bin samples:
///   row[n] = tx * sum_k alpha_k(m) * p(n*T - tau_k) + noise
/// with tau_k = 2*d_k/c and T = 2*range_res/c. Noise is drawn from `rng` in
/// bin order (skipped entirely when noise_sigma is 0).
inline std::vector<std::complex<double>> synthesize_frame(const RadarConfig& config,
                                                          const PulseShape& pulse,
                                                          const Scene& scene, std::size_t frame,
                                                          SplitMix64& rng, double t0 = 0.0) {
    const auto compiled = detail::compile_scene(config, pulse, scene);
    std::vector<std::complex<double>> row(compiled.bin_count);
    detail::synthesize_row(compiled, config, frame, t0, rng, row.data());
    return row;
}

/// Multi-frame capture, P = round(duration * frame_rate). Deterministic for
/// a fixed seed: frame m's noise comes from an independent stream keyed by
/// (seed, m).
inline FrameCapture synthesize_capture(const RadarConfig& config, const PulseShape& pulse,
                                       const Scene& scene, double duration_s,
                                       std::uint64_t seed, double t0 = 0.0,
                                       std::size_t memory_cap_bytes = std::size_t{512} << 20) {
    config.validate();
    if (!(duration_s > 0.0)) throw ValidationError("synthesize_capture: duration must be > 0");
    const auto frames =
        static_cast<std::size_t>(std::llround(duration_s * config.frame_rate_hz));
    if (frames < 1) throw ValidationError("synthesize_capture: duration yields no frames");
    const std::size_t bins = config.bin_count();
    if (frames * bins * sizeof(std::complex<double>) > memory_cap_bytes)
        throw ValidationError("synthesize_capture: capture exceeds memory cap");

    FrameCapture capture;
    capture.config = config;
    capture.frame_count = frames;
    capture.bin_count = bins;
    capture.t0_s = t0;
    capture.seed = seed;
    capture.samples.resize(frames * bins);

    const auto compiled = detail::compile_scene(config, pulse, scene);
    for (std::size_t m = 0; m < frames; ++m) {
        SplitMix64 rng(SplitMix64::derive_stream(seed, m));
        detail::synthesize_row(compiled, config, m, t0, rng, &capture.samples[m * bins]);
    }
    return capture;
}

} // namespace rbt::radar
