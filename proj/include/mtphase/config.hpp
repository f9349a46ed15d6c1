#pragma once

#include "mtphase/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mtphase {

/// Threshold search and spectral truncation.
struct AnalysisConfig {
    int M_max = 50;
    double threshold_tol = 1e-10;
    /// Ray for `threshold`/`transition`: "d" (d1=d2=d3=s), "d_scale" (s*(d1,d2,d3))
    /// or a single field name.
    std::string ray_axis = "d";
    double ray_lo = 0.01;
    double ray_hi = 1.0;

    bool operator==(const AnalysisConfig&) const = default;
};

struct SimulateConfig {
    int N = 256;
    double dt = 0;  ///< 0 = automatic (max_stable_dt)
    double T = 1000;
    std::string ic = "aligned";  ///< zero | aligned | random
    double ic_epsilon = 1e-2;
    double ic_amplitude = 1e-4;
    std::uint64_t seed = 0;
    int record_every = 10;
    bool project_mean = true;
    bool nonlinear = true;
    bool stop_on_saturation = false;

    bool operator==(const SimulateConfig&) const = default;
};

/// Two-parameter slice for `phase-diagram`.
struct SweepConfig {
    std::string x_axis = "d";
    double x_lo = 0.05;
    double x_hi = 0.5;
    int x_points = 100;
    std::string y_axis = "k7";
    double y_lo = 1.0;
    double y_hi = 4.0;
    int y_points = 100;
    int curve_points = 200;

    bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "mtphase_out";
    std::string formats = "csv";

    bool operator==(const OutputConfig&) const = default;
};

struct VerifyConfig {
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

    bool operator==(const VerifyConfig&) const = default;
};

struct RunConfig {
    ModelParams model;
    AnalysisConfig analysis;
    SimulateConfig simulate;
    SweepConfig sweep;
    OutputConfig output;
    VerifyConfig verify;

    bool operator==(const RunConfig&) const = default;
};

/// Parses INI text. Errors: ParseError (message carries line:column),
/// ValidationError (detail names the field), UnknownKey (detail is section.key).
RunConfig parse_config_text(std::string_view text);
/// Reads and parses a file; Io if it cannot be read.
RunConfig parse_config(const std::filesystem::path& path);

/// Canonical INI text; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

}  // namespace mtphase
