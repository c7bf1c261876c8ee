#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rbt/constants.hpp"
#include "rbt/errors.hpp"

namespace rbt::soil {

/// Complex permittivity plus conductivity of one medium.
struct DielectricState {
    double eps_real = 1.0; // relative real permittivity, >= 1
    double eps_imag = 0.0; // relative imaginary permittivity, >= 0
    double sigma = 0.0;    // bulk electrical conductivity, S/m
    double mu_rel = 1.0;   // relative magnetic permeability

    void validate() const {
        if (!std::isfinite(eps_real) || !std::isfinite(eps_imag) ||
            !std::isfinite(sigma) || !std::isfinite(mu_rel))
            throw ValidationError("DielectricState: non-finite field");
        if (eps_real < 1.0) throw ValidationError("DielectricState: eps_real must be >= 1");
        if (eps_imag < 0.0) throw ValidationError("DielectricState: eps_imag must be >= 0");
        if (sigma < 0.0) throw ValidationError("DielectricState: sigma must be >= 0");
        if (mu_rel <= 0.0) throw ValidationError("DielectricState: mu_rel must be > 0");
    }
};

/// Topp's empirical cubic mapping apparent permittivity to volumetric water
/// content, coefficients constant-first.
inline constexpr std::array<double, 4> kToppCoefficients = {-5.3e-2, 2.92e-2, -5.5e-4, 4.3e-6};

inline double evaluate_cubic(const std::array<double, 4>& c, double x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

enum class TextureClass { kSandyClayLoam, kSiltLoam, kClayLoam, kPottingSoil, kCustom };

enum class VwcMap { kTopp, kCalibratedCubic };

/// Soil texture: saturation moisture, conductivity at saturation, and the
/// moisture<->permittivity map used for this soil.
///
/// The preset theta_sat/ec_sat values are simulator defaults, not ground
/// truth; conductivity is treated as bulk EC and coupled linearly to
/// moisture (see conductivity_for_theta).
struct SoilTexture {
    TextureClass klass = TextureClass::kCustom;
    std::string name = "custom";
    double theta_sat = 0.40; // cm^3/cm^3, in (0,1)
    double ec_sat = 0.10;    // S/m at saturation
    VwcMap vwc_map = VwcMap::kTopp;
    std::array<double, 4> cubic = kToppCoefficients; // used when kCalibratedCubic

    void validate() const {
        if (!(theta_sat > 0.0 && theta_sat < 1.0))
            throw ValidationError("SoilTexture: theta_sat must be in (0,1)");
        if (!(ec_sat >= 0.0) || !std::isfinite(ec_sat))
            throw ValidationError("SoilTexture: ec_sat must be >= 0");
    }

    const std::array<double, 4>& vwc_coefficients() const {
        return vwc_map == VwcMap::kTopp ? kToppCoefficients : cubic;
    }

    static SoilTexture sandy_clay_loam() {
        return {TextureClass::kSandyClayLoam, "sandy_clay_loam", 0.40, 0.075,
                VwcMap::kTopp, kToppCoefficients};
    }
    static SoilTexture silt_loam() {
        return {TextureClass::kSiltLoam, "silt_loam", 0.45, 0.13,
                VwcMap::kTopp, kToppCoefficients};
    }
    static SoilTexture clay_loam() {
        return {TextureClass::kClayLoam, "clay_loam", 0.48, 0.20,
                VwcMap::kTopp, kToppCoefficients};
    }
    // High organic content: saturated EC roughly 10x the loams.
    static SoilTexture potting_soil() {
        return {TextureClass::kPottingSoil, "potting_soil", 0.60, 0.75,
                VwcMap::kTopp, kToppCoefficients};
    }
};

struct SoilLayer {
    double thickness = 0.0; // m
    double theta = 0.0;     // cm^3/cm^3
    SoilTexture texture;
};

/// Layered soil description, top layer first.
struct SoilProfile {
    std::vector<SoilLayer> layers;

    double total_thickness() const {
        double t = 0.0;
        for (const auto& l : layers) t += l.thickness;
        return t;
    }

    void validate() const {
        if (layers.empty()) throw ValidationError("SoilProfile: needs at least one layer");
        for (const auto& l : layers) {
            l.texture.validate();
            if (!(l.thickness > 0.0) || !std::isfinite(l.thickness))
                throw ValidationError("SoilProfile: layer thickness must be > 0");
            if (!(l.theta >= 0.0 && l.theta <= l.texture.theta_sat))
                throw ValidationError("SoilProfile: layer theta must be in [0, theta_sat]");
        }
    }

    static SoilProfile uniform(double thickness, double theta, SoilTexture texture) {
        return SoilProfile{{SoilLayer{thickness, theta, std::move(texture)}}};
    }
};

namespace detail {
inline void check_freq(double f) {
    if (!(f > 0.0) || !std::isfinite(f))
        throw ValidationError("frequency must be finite and > 0");
}
} // namespace detail

/// Apparent dielectric constant Ka, including the conductive/imaginary loss
/// term:
///   Ka = eps'/2 * [ sqrt(1 + ((eps'' + sigma/(2*pi*f*eps0)) / eps')^2) + 1 ]
/// Reduces to eps' for a lossless medium.
inline double apparent_dielectric(const DielectricState& s, double f) {
    s.validate();
    detail::check_freq(f);
    const double loss = (s.eps_imag + s.sigma / (2.0 * kPi * f * kVacuumPermittivity)) / s.eps_real;
    return 0.5 * s.eps_real * (std::sqrt(1.0 + loss * loss) + 1.0);
}

/// Phase velocity of a plane wave:
///   v = c * ( mu*eps'/2 * [1 + sqrt(1 + (sigma/omega)^2)] )^(-1/2)
/// with omega = 2*pi*f. For sigma=0, mu=1 this is exactly c/sqrt(eps').
inline double wave_velocity(const DielectricState& s, double f) {
    s.validate();
    detail::check_freq(f);
    const double omega = 2.0 * kPi * f;
    const double ratio = s.sigma / omega;
    const double factor = 0.5 * s.mu_rel * s.eps_real * (1.0 + std::sqrt(1.0 + ratio * ratio));
    return kSpeedOfLight / std::sqrt(factor);
}

/// Exact plane-wave attenuation constant (Np/m) with effective conductivity
/// sigma_eff = sigma + omega*eps0*eps'':
///   alpha = omega * sqrt( mu*mu0*eps'*eps0/2 * ( sqrt(1 + (sigma_eff/(omega*eps'*eps0))^2) - 1 ) )
/// Zero iff the medium is lossless.
inline double attenuation_constant(const DielectricState& s, double f) {
    s.validate();
    detail::check_freq(f);
    const double omega = 2.0 * kPi * f;
    const double sigma_eff = s.sigma + omega * kVacuumPermittivity * s.eps_imag;
    const double tan_loss = sigma_eff / (omega * s.eps_real * kVacuumPermittivity);
    const double inner = std::sqrt(1.0 + tan_loss * tan_loss) - 1.0;
    const double scale = 0.5 * s.mu_rel * kVacuumPermeability * s.eps_real * kVacuumPermittivity;
    return omega * std::sqrt(scale * inner);
}

/// Topp cubic, clamped to the physical range [0, 1]. The raw cubic dips
/// slightly negative for Ka near 1 (dry soil); the clamp keeps theta
/// physical without touching the fit region.
inline double topp_vwc(double ka) {
    if (!(ka >= 1.0) || !std::isfinite(ka))
        throw ValidationError("topp_vwc: Ka must be finite and >= 1");
    const double theta = evaluate_cubic(kToppCoefficients, ka);
    return std::fmin(std::fmax(theta, 0.0), 1.0);
}

namespace detail {
inline double clamped_cubic_vwc(const std::array<double, 4>& c, double ka) {
    const double theta = evaluate_cubic(c, ka);
    return std::fmin(std::fmax(theta, 0.0), 1.0);
}
} // namespace detail

/// Inverse of the texture's moisture map: the Ka on the monotone branch
/// [1, 81] whose (clamped) cubic evaluates to theta, found by bisection to
/// a 1e-9 tolerance in theta. theta=0 maps to the branch floor Ka=1.
inline double vwc_to_ka(double theta, const SoilTexture& texture = SoilTexture{}) {
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw ValidationError("vwc_to_ka: theta must be finite and >= 0");
    if (theta > texture.theta_sat + 1e-12)
        throw ValidationError("vwc_to_ka: theta exceeds texture saturation");
    const auto& c = texture.vwc_coefficients();
    constexpr double kKaLo = 1.0;
    constexpr double kKaHi = 81.0;
    double lo = kKaLo, hi = kKaHi;
    const double f_lo = detail::clamped_cubic_vwc(c, lo);
    const double f_hi = detail::clamped_cubic_vwc(c, hi);
    if (theta <= f_lo) return lo;
    if (theta > f_hi)
        throw ValidationError("vwc_to_ka: no root on branch [1, 81] for requested theta");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = detail::clamped_cubic_vwc(c, mid);
        if (std::abs(f_mid - theta) <= 1e-12 || (hi - lo) < 1e-13 * hi) return mid;
        if (f_mid < theta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// One-way travel time through `distance` of medium with apparent
/// permittivity Ka: tau = distance * sqrt(Ka) / c.
inline double one_way_tof(double distance, double ka) {
    if (!(distance >= 0.0) || !std::isfinite(distance))
        throw ValidationError("one_way_tof: distance must be finite and >= 0");
    if (!(ka >= 1.0) || !std::isfinite(ka))
        throw ValidationError("one_way_tof: Ka must be finite and >= 1");
    return distance * std::sqrt(ka) / kSpeedOfLight;
}

/// Effective apparent permittivity of the soil column above `depth`:
/// sqrt(Ka_eff) is the thickness-weighted mean of per-layer sqrt(Ka), so the
/// total travel time through the layers equals one_way_tof(depth, Ka_eff).
inline double profile_effective_ka(const SoilProfile& profile, double depth) {
    profile.validate();
    if (!(depth > 0.0) || !std::isfinite(depth))
        throw ValidationError("profile_effective_ka: depth must be > 0");
    if (depth > profile.total_thickness() + 1e-12)
        throw ValidationError("profile_effective_ka: depth exceeds profile thickness");
    double remaining = depth;
    double sqrt_sum = 0.0;
    for (const auto& layer : profile.layers) {
        if (remaining <= 0.0) break;
        const double span = std::fmin(layer.thickness, remaining);
        sqrt_sum += span * std::sqrt(vwc_to_ka(layer.theta, layer.texture));
        remaining -= span;
    }
    const double mean_sqrt = sqrt_sum / depth;
    return mean_sqrt * mean_sqrt;
}

/// Linear moisture->conductivity coupling used by the simulator:
/// sigma(theta) = ec_sat * theta / theta_sat.
inline double conductivity_for_theta(const SoilTexture& texture, double theta) {
    texture.validate();
    if (!(theta >= 0.0)) throw ValidationError("conductivity_for_theta: theta must be >= 0");
    return texture.ec_sat * theta / texture.theta_sat;
}

/// Dielectric state the simulator assigns to soil at a given moisture:
/// eps_real carries the full apparent permittivity of the moisture map (so
/// simulated travel times invert exactly), loss enters through sigma.
inline DielectricState dielectric_for_theta(const SoilTexture& texture, double theta) {
    DielectricState s;
    s.eps_real = vwc_to_ka(theta, texture);
    s.eps_imag = 0.0;
    s.sigma = conductivity_for_theta(texture, theta);
    s.mu_rel = 1.0;
    return s;
}

/// One-way field attenuation (Np) accumulated over the soil column down to
/// `depth` at frequency f.
inline double path_attenuation(const SoilProfile& profile, double depth, double f) {
    profile.validate();
    if (!(depth > 0.0)) throw ValidationError("path_attenuation: depth must be > 0");
    if (depth > profile.total_thickness() + 1e-12)
        throw ValidationError("path_attenuation: depth exceeds profile thickness");
    double remaining = depth;
    double total = 0.0;
    for (const auto& layer : profile.layers) {
        if (remaining <= 0.0) break;
        const double span = std::fmin(layer.thickness, remaining);
        total += span * attenuation_constant(dielectric_for_theta(layer.texture, layer.theta), f);
        remaining -= span;
    }
    return total;
}

} // namespace rbt::soil
