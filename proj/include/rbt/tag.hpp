#pragma once

#include <cmath>
#include <complex>

#include "rbt/errors.hpp"
#include "rbt/radar.hpp"
#include "rbt/soil.hpp"

namespace rbt::tags {

enum class TagMode { kSemiPassive, kActive };

/// Buried backscatter tag: an antenna toggled between grounded and open at
/// osc_freq, optionally with an amplifier in the reflection path.
struct TagConfig {
    TagMode mode = TagMode::kSemiPassive;
    double gain_db = 12.0; // applied only in active mode
    double osc_freq_hz = 80.0;
    double duty = 0.5;
    double phase_rad = 0.0;
    double depth_m = 0.30;              // burial depth d_s
    double base_rcs_amplitude = 1.0;    // reflection amplitude at zero soil loss

    void validate() const {
        if (!(osc_freq_hz > 0.0)) throw ValidationError("TagConfig: osc_freq_hz must be > 0");
        if (!(duty > 0.0 && duty < 1.0)) throw ValidationError("TagConfig: duty must be in (0,1)");
        if (!(depth_m > 0.0)) throw ValidationError("TagConfig: depth_m must be > 0");
        if (!(gain_db >= 0.0)) throw ValidationError("TagConfig: gain_db must be >= 0");
        if (!(base_rcs_amplitude >= 0.0))
            throw ValidationError("TagConfig: base_rcs_amplitude must be >= 0");
    }

    void validate_against(const radar::RadarConfig& radar_config) const {
        validate();
        if (!(osc_freq_hz < radar_config.frame_rate_hz / 2.0))
            throw ValidationError("TagConfig: osc_freq_hz must stay below the radar Nyquist rate");
    }

    double linear_gain() const {
        return mode == TagMode::kActive ? std::pow(10.0, gain_db / 20.0) : 1.0;
    }
};

/// Draw of one tag component, averaged as duty*active + (1-duty)*idle.
struct ComponentDraw {
    double active_mw = 0.0;
    double idle_mw = 0.0;
    double duty = 1.0;

    double average_mw() const {
        if (!(duty >= 0.0 && duty <= 1.0))
            throw ValidationError("ComponentDraw: duty must be in [0,1]");
        if (active_mw < 0.0 || idle_mw < 0.0)
            throw ValidationError("ComponentDraw: draws must be >= 0");
        return duty * active_mw + (1.0 - duty) * idle_mw;
    }
};

/// Per-component power budget of a tag build-out.
struct PowerProfile {
    ComponentDraw oscillator;
    ComponentDraw rf_switch;
    ComponentDraw power_mgmt;
    ComponentDraw rf_detector;
    ComponentDraw amplifier;
    ComponentDraw mcu;

    double average_draw_mw() const {
        return oscillator.average_mw() + rf_switch.average_mw() + power_mgmt.average_mw() +
               rf_detector.average_mw() + amplifier.average_mw() + mcu.average_mw();
    }

    /// Oscillator + RF switch + power management, always on (0.1167 mW).
    static PowerProfile semi_passive_always_on() {
        PowerProfile p;
        p.oscillator = {2.7e-3, 0.0, 1.0};
        p.rf_switch = {63e-3, 0.0, 1.0};
        p.power_mgmt = {51e-3, 0.0, 1.0};
        return p;
    }

    /// Full active build-out with everything powered (354.495 mW).
    static PowerProfile active_always_on() {
        PowerProfile p = semi_passive_always_on();
        p.rf_detector = {87.0, 3e-3, 1.0};
        p.amplifier = {267.0, 0.0, 1.0};
        p.mcu = {0.378, 2.2e-3, 1.0};
        return p;
    }

    /// Wake-on-demand duty cycling: amplifier and MCU wake for one minute a
    /// day, the RF detector polls for a wake signal 2 ms out of every
    /// second, everything else idles at its floor draw.
    static PowerProfile active_duty_cycled() {
        PowerProfile p = semi_passive_always_on();
        constexpr double kMinutePerDay = 1.0 / 1440.0;
        p.amplifier = {267.0, 0.0, kMinutePerDay};
        p.mcu = {0.378, 2.2e-3, kMinutePerDay};
        p.rf_detector = {87.0, 3e-3, 2e-3};
        return p;
    }
};

struct Battery {
    int cell_count = 1;
    double capacity_mah = 0.0; // per cell
    double nominal_v = 1.5;    // per cell

    double energy_mwh() const { return cell_count * capacity_mah * nominal_v; }

    void validate() const {
        if (cell_count < 1 || !(capacity_mah > 0.0) || !(nominal_v > 0.0))
            throw ValidationError("Battery: all fields must be positive");
    }

    static Battery four_aa() { return {4, 2500.0, 1.5}; }
};

/// Projected lifetime in years: battery energy divided by the duty-weighted
/// average draw. No derating or self-discharge.
inline double battery_life_years(const PowerProfile& profile, const Battery& battery) {
    battery.validate();
    const double draw = profile.average_draw_mw();
    if (!(draw > 0.0)) throw ValidationError("battery_life: average draw must be > 0");
    return battery.energy_mwh() / draw / 8760.0;
}

/// Link budget for an out-of-band wake signal reaching the buried detector.
inline double wake_link_margin_db(double tx_dbm, double soil_loss_db,
                                  double detector_sensitivity_dbm) {
    return tx_dbm - soil_loss_db - detector_sensitivity_dbm;
}

/// Scene representation of a buried tag: the soil column stretches its
/// apparent one-way distance to d_air + depth*sqrt(Ka_eff) and attenuates
/// the two-way reflection by exp(-2 * integrated alpha).
inline radar::Reflector tag_as_reflector(const TagConfig& tag, const soil::SoilProfile& profile,
                                         double d_air, const radar::RadarConfig& radar_config) {
    tag.validate_against(radar_config);
    if (!(d_air >= 0.0)) throw ValidationError("tag_as_reflector: d_air must be >= 0");
    if (tag.depth_m > profile.total_thickness() + 1e-12)
        throw ValidationError("tag_as_reflector: profile does not cover tag depth");

    const double ka_eff = soil::profile_effective_ka(profile, tag.depth_m);
    const double apparent = d_air + tag.depth_m * std::sqrt(ka_eff);
    const double alpha_path =
        soil::path_attenuation(profile, tag.depth_m, radar_config.center_freq_hz);
    const double amplitude =
        tag.base_rcs_amplitude * std::exp(-2.0 * alpha_path) * tag.linear_gain();

    radar::Reflector r;
    r.distance_m = apparent;
    r.amplitude = {amplitude, 0.0};
    r.modulation = radar::OnOffSquare{tag.osc_freq_hz, tag.duty, tag.phase_rad};
    return r;
}

} // namespace rbt::tags
