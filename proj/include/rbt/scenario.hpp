#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbt/capture_io.hpp"
#include "rbt/errors.hpp"
#include "rbt/moisture.hpp"
#include "rbt/radar.hpp"
#include "rbt/rng.hpp"
#include "rbt/soil.hpp"
#include "rbt/tag.hpp"

namespace rbt::sim {

/// Static background of the scene: one strong surface echo plus log-normal
/// point clutter filling the soil region, so the tag is always one reflector
/// among many.
struct ClutterSpec {
    double reflectors_per_bin = 3.0;
    double amplitude_scale = 0.25; // log-normal median amplitude
    double log_sigma = 0.5;
    double surface_amplitude = 3.0;

    void validate() const {
        if (reflectors_per_bin < 0.0 || amplitude_scale < 0.0 || log_sigma < 0.0 ||
            surface_amplitude < 0.0)
            throw ValidationError("ClutterSpec: fields must be >= 0");
    }
};

/// Everything needed to synthesize one capture deterministically.
struct Scenario {
    radar::RadarConfig radar;
    std::optional<tags::TagConfig> tag;
    soil::SoilProfile profile;
    double d_air_m = 1.0;
    double duration_s = 10.0;
    std::uint64_t seed = 1;
    ClutterSpec clutter;

    void validate() const {
        radar.validate();
        profile.validate();
        clutter.validate();
        if (!(duration_s > 0.0)) throw ValidationError("Scenario: duration_s must be > 0");
        if (!(d_air_m >= radar.range_start_m && d_air_m < radar.range_end_m))
            throw ValidationError("Scenario: d_air_m outside the radar sensing window");
        if (tag) {
            tag->validate_against(radar);
            if (tag->depth_m > profile.total_thickness() + 1e-12)
                throw ValidationError("Scenario: profile does not cover tag depth");
        }
    }
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
    if (!j.is_object()) throw ValidationError(context + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* k) { return it.key() == k; });
        if (!known)
            throw ValidationError(context + ": unknown field '" + it.key() + "'");
    }
}

template <typename T>
T get_field(const json& j, const char* key, T fallback, const std::string& context) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(context + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T require_field(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) throw ValidationError(context + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(context + ": field '" + key + "' has the wrong type");
    }
}

inline std::string dump_number(double v) { return json(v).dump(); }

} // namespace detail

inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

// --- JSON serialization ----------------------------------------------------

inline nlohmann::json texture_to_json(const soil::SoilTexture& t) {
    if (t.klass != soil::TextureClass::kCustom) return t.name;
    nlohmann::json j = {{"theta_sat", t.theta_sat}, {"ec_sat", t.ec_sat}};
    j["vwc_map"] = t.vwc_map == soil::VwcMap::kTopp ? "topp" : "cubic";
    if (t.vwc_map == soil::VwcMap::kCalibratedCubic)
        j["cubic_coeffs"] = t.cubic;
    return j;
}

inline soil::SoilTexture texture_from_json(const nlohmann::json& j, const std::string& context) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "sandy_clay_loam") return soil::SoilTexture::sandy_clay_loam();
        if (name == "silt_loam") return soil::SoilTexture::silt_loam();
        if (name == "clay_loam") return soil::SoilTexture::clay_loam();
        if (name == "potting_soil") return soil::SoilTexture::potting_soil();
        throw ValidationError(context + ": unknown texture preset '" + name + "'");
    }
    detail::check_keys(j, {"theta_sat", "ec_sat", "vwc_map", "cubic_coeffs"}, context);
    soil::SoilTexture t;
    t.klass = soil::TextureClass::kCustom;
    t.name = "custom";
    t.theta_sat = detail::require_field<double>(j, "theta_sat", context);
    t.ec_sat = detail::require_field<double>(j, "ec_sat", context);
    const auto map_name = detail::get_field<std::string>(j, "vwc_map", "topp", context);
    if (map_name == "topp") {
        t.vwc_map = soil::VwcMap::kTopp;
    } else if (map_name == "cubic") {
        t.vwc_map = soil::VwcMap::kCalibratedCubic;
        const auto coeffs =
            detail::require_field<std::vector<double>>(j, "cubic_coeffs", context);
        if (coeffs.size() != 4)
            throw ValidationError(context + ": cubic_coeffs needs exactly 4 values");
        std::copy(coeffs.begin(), coeffs.end(), t.cubic.begin());
    } else {
        throw ValidationError(context + ": vwc_map must be 'topp' or 'cubic'");
    }
    t.validate();
    return t;
}

inline nlohmann::json tag_to_json(const tags::TagConfig& t) {
    return {
        {"mode", t.mode == tags::TagMode::kActive ? "active" : "semi_passive"},
        {"gain_db", t.gain_db},
        {"osc_freq_hz", t.osc_freq_hz},
        {"duty", t.duty},
        {"phase_rad", t.phase_rad},
        {"depth_m", t.depth_m},
        {"base_rcs_amplitude", t.base_rcs_amplitude},
    };
}

inline tags::TagConfig tag_from_json(const nlohmann::json& j, const std::string& context) {
    detail::check_keys(j,
                       {"mode", "gain_db", "osc_freq_hz", "duty", "phase_rad", "depth_m",
                        "base_rcs_amplitude"},
                       context);
    tags::TagConfig t;
    const auto mode = detail::get_field<std::string>(j, "mode", "semi_passive", context);
    if (mode == "semi_passive")
        t.mode = tags::TagMode::kSemiPassive;
    else if (mode == "active")
        t.mode = tags::TagMode::kActive;
    else
        throw ValidationError(context + ": mode must be 'semi_passive' or 'active'");
    t.gain_db = detail::get_field<double>(j, "gain_db", t.gain_db, context);
    t.osc_freq_hz = detail::get_field<double>(j, "osc_freq_hz", t.osc_freq_hz, context);
    t.duty = detail::get_field<double>(j, "duty", t.duty, context);
    t.phase_rad = detail::get_field<double>(j, "phase_rad", t.phase_rad, context);
    t.depth_m = detail::require_field<double>(j, "depth_m", context);
    t.base_rcs_amplitude =
        detail::get_field<double>(j, "base_rcs_amplitude", t.base_rcs_amplitude, context);
    return t;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : s.profile.layers)
        layers.push_back({{"thickness_m", l.thickness},
                          {"theta", l.theta},
                          {"texture", texture_to_json(l.texture)}});
    nlohmann::json j = {
        {"version", 1},
        {"radar", io::radar_config_to_json(s.radar)},
        {"profile", {{"layers", layers}}},
        {"d_air_m", s.d_air_m},
        {"duration_s", s.duration_s},
        {"seed", s.seed},
        {"clutter",
         {{"reflectors_per_bin", s.clutter.reflectors_per_bin},
          {"amplitude_scale", s.clutter.amplitude_scale},
          {"log_sigma", s.clutter.log_sigma},
          {"surface_amplitude", s.clutter.surface_amplitude}}},
    };
    if (s.tag) j["tag"] = tag_to_json(*s.tag);
    return j;
}

/// Strict scenario parser: unknown fields anywhere are rejected so typos in
/// physics parameters fail loudly instead of silently using defaults.
inline Scenario scenario_from_json(const nlohmann::json& j, bool require_version = true) {
    const std::string ctx = "scenario";
    detail::check_keys(
        j, {"version", "radar", "tag", "profile", "d_air_m", "duration_s", "seed", "clutter"},
        ctx);
    if (require_version) {
        const auto version = detail::require_field<int>(j, "version", ctx);
        if (version != 1) throw ValidationError(ctx + ": unsupported version");
    }

    Scenario s;
    if (j.contains("radar")) {
        const auto& rj = j.at("radar");
        detail::check_keys(rj,
                           {"center_freq_hz", "bandwidth_hz", "frame_rate_hz", "range_start_m",
                            "range_end_m", "range_res_m", "tx_amplitude", "noise_sigma"},
                           ctx + ".radar");
        radar::RadarConfig d;
        s.radar.center_freq_hz = detail::get_field(rj, "center_freq_hz", d.center_freq_hz, ctx);
        s.radar.bandwidth_hz = detail::get_field(rj, "bandwidth_hz", d.bandwidth_hz, ctx);
        s.radar.frame_rate_hz = detail::get_field(rj, "frame_rate_hz", d.frame_rate_hz, ctx);
        s.radar.range_start_m = detail::get_field(rj, "range_start_m", d.range_start_m, ctx);
        s.radar.range_end_m = detail::get_field(rj, "range_end_m", d.range_end_m, ctx);
        s.radar.range_res_m = detail::get_field(rj, "range_res_m", d.range_res_m, ctx);
        s.radar.tx_amplitude = detail::get_field(rj, "tx_amplitude", d.tx_amplitude, ctx);
        s.radar.noise_sigma = detail::get_field(rj, "noise_sigma", d.noise_sigma, ctx);
    }
    if (j.contains("tag") && !j.at("tag").is_null())
        s.tag = tag_from_json(j.at("tag"), ctx + ".tag");

    const auto& pj = j.contains("profile") ? j.at("profile") : nlohmann::json::object();
    detail::check_keys(pj, {"layers"}, ctx + ".profile");
    if (!pj.contains("layers") || !pj.at("layers").is_array() || pj.at("layers").empty())
        throw ValidationError(ctx + ".profile: needs a non-empty 'layers' array");
    for (const auto& lj : pj.at("layers")) {
        detail::check_keys(lj, {"thickness_m", "theta", "texture"}, ctx + ".profile.layer");
        soil::SoilLayer layer;
        layer.thickness = detail::require_field<double>(lj, "thickness_m", ctx);
        layer.theta = detail::require_field<double>(lj, "theta", ctx);
        layer.texture = lj.contains("texture")
                            ? texture_from_json(lj.at("texture"), ctx + ".profile.layer.texture")
                            : soil::SoilTexture::sandy_clay_loam();
        s.profile.layers.push_back(std::move(layer));
    }

    s.d_air_m = detail::get_field(j, "d_air_m", s.d_air_m, ctx);
    s.duration_s = detail::get_field(j, "duration_s", s.duration_s, ctx);
    s.seed = detail::get_field<std::uint64_t>(j, "seed", s.seed, ctx);
    if (j.contains("clutter")) {
        const auto& cj = j.at("clutter");
        detail::check_keys(
            cj, {"reflectors_per_bin", "amplitude_scale", "log_sigma", "surface_amplitude"},
            ctx + ".clutter");
        s.clutter.reflectors_per_bin =
            detail::get_field(cj, "reflectors_per_bin", s.clutter.reflectors_per_bin, ctx);
        s.clutter.amplitude_scale =
            detail::get_field(cj, "amplitude_scale", s.clutter.amplitude_scale, ctx);
        s.clutter.log_sigma = detail::get_field(cj, "log_sigma", s.clutter.log_sigma, ctx);
        s.clutter.surface_amplitude =
            detail::get_field(cj, "surface_amplitude", s.clutter.surface_amplitude, ctx);
    }
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scenario: invalid JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

/// Digest of the canonical (normalized, key-sorted) scenario serialization;
/// embedded in every capture and output record for provenance.
inline std::string scenario_digest(const Scenario& s) {
    return fnv1a_hex(scenario_to_json(s).dump());
}

// --- Scene assembly and simulation ------------------------------------------

/// Thickness-weighted mean moisture over [0, depth]; what a path-averaging
/// measurement ideally reports.
inline double path_average_theta(const soil::SoilProfile& profile, double depth) {
    double remaining = depth;
    double acc = 0.0;
    for (const auto& layer : profile.layers) {
        if (remaining <= 0.0) break;
        const double span = std::fmin(layer.thickness, remaining);
        acc += span * layer.theta;
        remaining -= span;
    }
    return acc / depth;
}

inline radar::Scene build_scene(const Scenario& s) {
    s.validate();
    radar::Scene scene;
    scene.push_back(
        radar::Reflector{s.d_air_m, {s.clutter.surface_amplitude, 0.0}, radar::Static{}});

    const double r = s.radar.range_res_m;
    const double lo = s.d_air_m + 0.5 * r;
    const double hi = s.radar.range_end_m - r;
    if (hi > lo && s.clutter.reflectors_per_bin > 0.0) {
        const double bins_spanned = (hi - lo) / r;
        const auto count =
            static_cast<std::size_t>(std::llround(s.clutter.reflectors_per_bin * bins_spanned));
        SplitMix64 rng(SplitMix64::derive_stream(s.seed, 0x5EEDC1A77E12ull));
        for (std::size_t i = 0; i < count; ++i) {
            const double dist = rng.uniform(lo, hi);
            const double amp = s.clutter.amplitude_scale * std::exp(s.clutter.log_sigma * rng.gaussian());
            const double phase = 2.0 * kPi * rng.uniform01();
            scene.push_back(radar::Reflector{dist, std::polar(amp, phase), radar::Static{}});
        }
    }

    if (s.tag) {
        auto reflector = tags::tag_as_reflector(*s.tag, s.profile, s.d_air_m, s.radar);
        if (reflector.distance_m >= s.radar.range_end_m)
            throw ValidationError(
                "Scenario: tag apparent distance falls beyond the sensing window; "
                "extend range_end_m");
        scene.push_back(std::move(reflector));
    }
    return scene;
}

/// Synthesize the capture a radar would record over this scenario and stamp
/// it with full provenance (digest, seed, geometry, ground truth).
inline radar::FrameCapture simulate(const Scenario& s) {
    const auto scene = build_scene(s);
    const auto pulse = radar::PulseShape::gaussian_for_bandwidth(s.radar.bandwidth_hz);
    auto capture = radar::synthesize_capture(s.radar, pulse, scene, s.duration_s, s.seed);

    auto& a = capture.annotations;
    a["scenario_digest"] = scenario_digest(s);
    a["d_air_m"] = detail::dump_number(s.d_air_m);
    a["duration_s"] = detail::dump_number(s.duration_s);
    if (s.tag) {
        a["d_soil_m"] = detail::dump_number(s.tag->depth_m);
        a["osc_freq_hz"] = detail::dump_number(s.tag->osc_freq_hz);
        a["duty"] = detail::dump_number(s.tag->duty);
        a["tag_mode"] = s.tag->mode == tags::TagMode::kActive ? "active" : "semi_passive";
        a["true_theta_avg"] =
            detail::dump_number(path_average_theta(s.profile, s.tag->depth_m));
    }
    return capture;
}

// --- Sweeps ------------------------------------------------------------------

enum class SweepVariable { kTheta, kDepth, kDuration, kCenterFreq, kOscFreq };

inline const char* sweep_variable_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::kTheta: return "theta";
        case SweepVariable::kDepth: return "depth";
        case SweepVariable::kDuration: return "duration";
        case SweepVariable::kCenterFreq: return "center_freq";
        case SweepVariable::kOscFreq: return "osc_freq";
    }
    return "?";
}

struct SweepSpec {
    SweepVariable variable = SweepVariable::kTheta;
    std::vector<double> values;
    int replicates = 1;
    Scenario base;

    void validate() const {
        if (values.empty()) throw ValidationError("SweepSpec: values must be non-empty");
        if (replicates < 1) throw ValidationError("SweepSpec: replicates must be >= 1");
        base.validate();
        if (!base.tag) throw ValidationError("SweepSpec: base scenario needs a tag");
    }
};

inline SweepSpec sweep_from_json(const nlohmann::json& j) {
    const std::string ctx = "sweep";
    detail::check_keys(j, {"version", "variable", "values", "replicates", "base"}, ctx);
    const auto version = detail::require_field<int>(j, "version", ctx);
    if (version != 1) throw ValidationError(ctx + ": unsupported version");

    SweepSpec spec;
    const auto var = detail::require_field<std::string>(j, "variable", ctx);
    if (var == "theta")
        spec.variable = SweepVariable::kTheta;
    else if (var == "depth")
        spec.variable = SweepVariable::kDepth;
    else if (var == "duration")
        spec.variable = SweepVariable::kDuration;
    else if (var == "center_freq")
        spec.variable = SweepVariable::kCenterFreq;
    else if (var == "osc_freq")
        spec.variable = SweepVariable::kOscFreq;
    else
        throw ValidationError(ctx + ": unknown variable '" + var + "'");
    spec.values = detail::require_field<std::vector<double>>(j, "values", ctx);
    spec.replicates = detail::get_field<int>(j, "replicates", 1, ctx);
    if (!j.contains("base")) throw ValidationError(ctx + ": missing field 'base'");
    spec.base = scenario_from_json(j.at("base"), /*require_version=*/false);
    spec.validate();
    return spec;
}

inline SweepSpec load_sweep(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("sweep: invalid JSON: ") + e.what());
    }
    return sweep_from_json(j);
}

inline Scenario apply_sweep_value(const SweepSpec& spec, double value) {
    Scenario s = spec.base;
    switch (spec.variable) {
        case SweepVariable::kTheta:
            for (auto& layer : s.profile.layers) layer.theta = value;
            break;
        case SweepVariable::kDepth:
            s.tag->depth_m = value;
            break;
        case SweepVariable::kDuration:
            s.duration_s = value;
            break;
        case SweepVariable::kCenterFreq:
            s.radar.center_freq_hz = value;
            break;
        case SweepVariable::kOscFreq:
            s.tag->osc_freq_hz = value;
            break;
    }
    return s;
}

struct SweepRow {
    std::string variable;
    double value = 0.0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double true_theta = 0.0;
    std::optional<double> est_theta;
    double error = std::numeric_limits<double>::quiet_NaN();
    double ka = std::numeric_limits<double>::quiet_NaN();
    double delta_tof_ns = std::numeric_limits<double>::quiet_NaN();
    double snr_db = 0.0;
    bool detected = false;
    std::string flags;
    std::string digest;
};

struct SweepOptions {
    moisture::KaMode ka_mode = moisture::KaMode::kExact;
    double threshold_db = 10.0;
    moisture::CalibrationCurve curve = moisture::CalibrationCurve::topp();
};

/// Run every (value, replicate) cell: replicate k re-seeds the base scenario
/// with seed+k, simulates, and runs the full estimation chain. Rows come out
/// ordered by (value as listed, replicate).
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options = {}) {
    spec.validate();
    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size() * static_cast<std::size_t>(spec.replicates));
    for (double value : spec.values) {
        for (int k = 0; k < spec.replicates; ++k) {
            Scenario s = apply_sweep_value(spec, value);
            s.seed = spec.base.seed + static_cast<std::uint64_t>(k);
            try {
                const auto capture = simulate(s);
                moisture::MeasurementGeometry geom{s.d_air_m, s.tag->depth_m,
                                                   s.radar.range_res_m};
                moisture::EstimateOptions est_options;
                est_options.mode = options.ka_mode;
                est_options.threshold_db = options.threshold_db;
                const auto est =
                    moisture::estimate_vwc(capture, *s.tag, geom, options.curve, est_options);

                SweepRow row;
                row.variable = sweep_variable_name(spec.variable);
                row.value = value;
                row.replicate = k;
                row.seed = s.seed;
                row.true_theta = path_average_theta(s.profile, s.tag->depth_m);
                row.est_theta = est.theta;
                if (est.theta) row.error = *est.theta - row.true_theta;
                row.ka = est.ka;
                row.delta_tof_ns = est.delta_tof_s * 1e9;
                row.snr_db = est.snr_db;
                row.detected = !est.has(moisture::kLowSnr);
                const auto names = est.flag_names();
                for (std::size_t i = 0; i < names.size(); ++i)
                    row.flags += (i ? "|" : "") + names[i];
                row.digest = scenario_digest(s);
                rows.push_back(std::move(row));
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "sweep failed at " << sweep_variable_name(spec.variable) << "=" << value
                    << " replicate " << k << ": " << e.what();
                throw ValidationError(msg.str());
            }
        }
    }
    return rows;
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "variable,value,replicate,seed,true_theta,est_theta,error,ka,delta_tof_ns,"
           "snr_db,detected,flags,digest\n";
    for (const auto& r : rows) {
        out << r.variable << ',' << format_double(r.value) << ',' << r.replicate << ',' << r.seed
            << ',' << format_double(r.true_theta) << ','
            << (r.est_theta ? format_double(*r.est_theta) : "") << ',' << format_double(r.error)
            << ',' << format_double(r.ka) << ',' << format_double(r.delta_tof_ns) << ','
            << format_double(r.snr_db) << ',' << (r.detected ? 1 : 0) << ',' << r.flags << ','
            << r.digest << '\n';
    }
}

} // namespace rbt::sim
