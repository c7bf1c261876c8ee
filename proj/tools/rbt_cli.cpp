// Command-line front end: scenario-driven simulation, capture processing,
// gravimetric calibration fitting, and parameter sweeps.
//
// Exit codes: 0 success/detected, 2 validation error, 3 I/O or corrupt file,
// 4 tag not detected.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbt/capture_io.hpp"
#include "rbt/errors.hpp"
#include "rbt/moisture.hpp"
#include "rbt/scenario.hpp"
#include "rbt/svg_plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNotDetected = 4;

double annotation_number(const rbt::radar::FrameCapture& capture, const std::string& key,
                         const std::string& flag_hint) {
    const auto it = capture.annotations.find(key);
    if (it == capture.annotations.end())
        throw rbt::ValidationError("capture has no '" + key + "' annotation; pass " + flag_hint);
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw rbt::ValidationError("capture annotation '" + key + "' is not numeric");
    }
}

nlohmann::json curve_to_json(const rbt::moisture::CalibrationCurve& curve) {
    return {
        {"version", 1},
        {"coefficients", curve.coefficients},
        {"fit_rmse", curve.fit_rmse},
        {"n_points", curve.n_points},
        {"ka_min", curve.ka_min},
        {"ka_max", curve.ka_max},
    };
}

rbt::moisture::CalibrationCurve curve_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw rbt::IoError("cannot open calibration file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw rbt::IoError(std::string("calibration file: invalid JSON: ") + e.what());
    }
    rbt::moisture::CalibrationCurve curve;
    try {
        if (j.at("version").get<int>() != 1)
            throw rbt::ValidationError("calibration file: unsupported version");
        const auto coeffs = j.at("coefficients").get<std::vector<double>>();
        if (coeffs.size() != 4)
            throw rbt::ValidationError("calibration file: needs exactly 4 coefficients");
        std::copy(coeffs.begin(), coeffs.end(), curve.coefficients.begin());
        curve.fit_rmse = j.value("fit_rmse", 0.0);
        curve.n_points = j.value("n_points", 0);
        curve.ka_min = j.value("ka_min", 1.0);
        curve.ka_max = j.value("ka_max", 40.0);
    } catch (const nlohmann::json::exception& e) {
        throw rbt::ValidationError(std::string("calibration file: ") + e.what());
    }
    return curve;
}

std::vector<std::pair<double, double>> read_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw rbt::IoError("cannot open pairs file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw rbt::ValidationError("pairs CSV: empty file");
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        std::size_t i = 0;
        while (i < s.size() && s[i] == ' ') ++i;
        return s.substr(i);
    };
    if (strip(line) != "ka,theta")
        throw rbt::ValidationError("pairs CSV: header must be exactly 'ka,theta'");
    std::vector<std::pair<double, double>> pairs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto stripped = strip(line);
        if (stripped.empty()) continue;
        const auto comma = stripped.find(',');
        if (comma == std::string::npos)
            throw rbt::ValidationError("pairs CSV: line " + std::to_string(lineno) +
                                       ": expected 'ka,theta'");
        try {
            std::size_t used = 0;
            const double ka = std::stod(stripped.substr(0, comma), &used);
            const double theta = std::stod(stripped.substr(comma + 1), &used);
            pairs.emplace_back(ka, theta);
        } catch (const std::exception&) {
            throw rbt::ValidationError("pairs CSV: line " + std::to_string(lineno) +
                                       ": malformed number");
        }
    }
    return pairs;
}

int run_simulate(const std::string& scenario_path, const std::string& out_path) {
    const auto scenario = rbt::sim::load_scenario(scenario_path);
    const auto capture = rbt::sim::simulate(scenario);
    rbt::io::write_capture(out_path, capture);
    nlohmann::json record = {
        {"digest", rbt::sim::scenario_digest(scenario)},
        {"frames", capture.frame_count},
        {"bins", capture.bin_count},
        {"seed", capture.seed},
        {"output", out_path},
    };
    std::cout << record.dump() << "\n";
    return kExitOk;
}

int run_process(const std::string& capture_path, std::optional<double> d_air,
                std::optional<double> d_soil, std::optional<double> osc_freq,
                const std::string& calibration_path, const std::string& ka_mode,
                double threshold_db) {
    const auto capture = rbt::io::read_capture(capture_path);

    rbt::moisture::MeasurementGeometry geom;
    geom.range_res_m = capture.config.range_res_m;
    geom.d_air_m = d_air ? *d_air : annotation_number(capture, "d_air_m", "--d-air");
    geom.d_soil_m = d_soil ? *d_soil : annotation_number(capture, "d_soil_m", "--d-soil");

    rbt::tags::TagConfig tag;
    tag.depth_m = geom.d_soil_m;
    tag.osc_freq_hz =
        osc_freq ? *osc_freq : annotation_number(capture, "osc_freq_hz", "--osc-freq");

    auto curve = rbt::moisture::CalibrationCurve::topp();
    if (!calibration_path.empty()) curve = curve_from_file(calibration_path);

    rbt::moisture::EstimateOptions options;
    options.mode = ka_mode == "paper" ? rbt::moisture::KaMode::kPaperApprox
                                      : rbt::moisture::KaMode::kExact;
    options.threshold_db = threshold_db;

    const auto est = rbt::moisture::estimate_vwc(capture, tag, geom, curve, options);

    nlohmann::json record = {
        {"theta", est.theta ? nlohmann::json(*est.theta) : nlohmann::json()},
        {"ka", est.ka},
        {"delta_tof_ns", est.delta_tof_s * 1e9},
        {"snr_db", est.snr_db},
        {"flags", est.flag_names()},
        {"mode", rbt::moisture::ka_mode_name(est.mode)},
        {"expected_bin", est.expected_bin},
        {"measured_bin", est.measured_bin},
        {"detected", !est.has(rbt::moisture::kLowSnr)},
        {"seed", capture.seed},
    };
    if (const auto it = capture.annotations.find("scenario_digest");
        it != capture.annotations.end())
        record["digest"] = it->second;
    std::cout << record.dump() << "\n";
    return est.has(rbt::moisture::kLowSnr) ? kExitNotDetected : kExitOk;
}

int run_calibrate(const std::string& pairs_path, const std::string& out_path) {
    const auto pairs = read_pairs_csv(pairs_path);
    const auto curve = rbt::moisture::fit_calibration(pairs);
    std::ofstream out(out_path);
    if (!out) throw rbt::IoError("cannot open for writing: " + out_path);
    out << curve_to_json(curve).dump(2) << "\n";
    if (!out) throw rbt::IoError("write failed: " + out_path);
    nlohmann::json record = {
        {"fit_rmse", curve.fit_rmse}, {"n_points", curve.n_points}, {"output", out_path}};
    std::cout << record.dump() << "\n";
    return kExitOk;
}

int run_sweep(const std::string& sweep_path, const std::string& out_path,
              const std::string& plot_path, const std::string& ka_mode, double threshold_db,
              const std::string& calibration_path) {
    const auto spec = rbt::sim::load_sweep(sweep_path);
    rbt::sim::SweepOptions options;
    options.ka_mode = ka_mode == "paper" ? rbt::moisture::KaMode::kPaperApprox
                                         : rbt::moisture::KaMode::kExact;
    options.threshold_db = threshold_db;
    if (!calibration_path.empty()) options.curve = curve_from_file(calibration_path);

    const auto rows = rbt::sim::run_sweep(spec, options);
    std::ofstream out(out_path);
    if (!out) throw rbt::IoError("cannot open for writing: " + out_path);
    rbt::sim::write_sweep_csv(out, rows);
    if (!out) throw rbt::IoError("write failed: " + out_path);
    if (!plot_path.empty()) {
        std::ofstream plot(plot_path);
        if (!plot) throw rbt::IoError("cannot open for writing: " + plot_path);
        rbt::sim::write_sweep_svg(plot, rows);
    }
    nlohmann::json record = {{"rows", rows.size()}, {"output", out_path}};
    std::cout << record.dump() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radar backscatter-tag soil moisture toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, capture_out;
    auto* simulate = app.add_subcommand("simulate", "Synthesize a capture from a scenario file");
    simulate->add_option("scenario", scenario_path, "Scenario JSON")->required();
    simulate->add_option("-o,--output", capture_out, "Output capture (.rbt)")->required();

    std::string capture_path, calibration_path, ka_mode = "exact";
    double threshold_db = 10.0;
    std::optional<double> d_air, d_soil, osc_freq;
    auto* process = app.add_subcommand("process", "Estimate moisture from a capture");
    process->add_option("capture", capture_path, "Capture file (.rbt)")->required();
    process->add_option("--d-air", d_air, "Radar-to-surface distance (m)");
    process->add_option("--d-soil", d_soil, "Tag burial depth (m)");
    process->add_option("--osc-freq", osc_freq, "Tag oscillation frequency (Hz)");
    process->add_option("--calibration", calibration_path, "Calibration curve JSON");
    process->add_option("--ka-mode", ka_mode, "Ka inversion: exact|paper")
        ->check(CLI::IsMember({"exact", "paper"}));
    process->add_option("--threshold-db", threshold_db, "Detection threshold (dB)");

    std::string pairs_path, calibration_out;
    auto* calibrate = app.add_subcommand("calibrate", "Fit a calibration curve from ka,theta CSV");
    calibrate->add_option("pairs", pairs_path, "CSV with header 'ka,theta'")->required();
    calibrate->add_option("-o,--output", calibration_out, "Output calibration JSON")->required();

    std::string sweep_path, sweep_out, plot_path, sweep_ka_mode = "exact",
                                                  sweep_calibration;
    double sweep_threshold = 10.0;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep to CSV");
    sweep->add_option("spec", sweep_path, "Sweep spec JSON")->required();
    sweep->add_option("-o,--output", sweep_out, "Output CSV")->required();
    sweep->add_option("--plot", plot_path, "Optional SVG plot output");
    sweep->add_option("--ka-mode", sweep_ka_mode, "Ka inversion: exact|paper")
        ->check(CLI::IsMember({"exact", "paper"}));
    sweep->add_option("--threshold-db", sweep_threshold, "Detection threshold (dB)");
    sweep->add_option("--calibration", sweep_calibration, "Calibration curve JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (simulate->parsed()) return run_simulate(scenario_path, capture_out);
        if (process->parsed())
            return run_process(capture_path, d_air, d_soil, osc_freq, calibration_path, ka_mode,
                               threshold_db);
        if (calibrate->parsed()) return run_calibrate(pairs_path, calibration_out);
        if (sweep->parsed())
            return run_sweep(sweep_path, sweep_out, plot_path, sweep_ka_mode, sweep_threshold,
                             sweep_calibration);
    } catch (const rbt::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const rbt::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
