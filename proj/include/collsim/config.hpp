#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collsim/mask.hpp"
#include "collsim/noise.hpp"
#include "collsim/random.hpp"

namespace collsim {

/// Scatter model configuration. The kernel width and primary intensity are
/// resolved per input image: sigma = kernel_sigma_frac * min(width, height),
/// and primary_intensity <= 0 means "use the 99.5th percentile of the input".
struct ScatterConfig {
    /// Default magnitude, calibrated against the bundled 256x256 gradient
    /// phantom so the deep-shadow scatter fraction hits 1.6% of I_0
    /// (mid-band). Re-derive with `collsim calibrate`.
    static constexpr double kDefaultMagnitude = 0.027541362184723153;

    double exponent_alpha = 0.5;
    double exponent_beta = 1.0;
    double magnitude_c = kDefaultMagnitude;
    double kernel_sigma_frac = 0.04;
    double primary_intensity = 0.0;
    double band_low = 0.012;  // acceptance band for the deep-shadow
    double band_high = 0.02;  // scatter fraction
};

struct OutputConfig {
    std::string dir = "out";
    int bit_depth = 16;
    std::string image_format = "pgm"; // pgm | rawf
};

/// Everything that governs one pipeline run. A (config, input set) pair
/// fully determines all outputs.
struct PipelineConfig {
    std::uint64_t seed = 20240915;
    int samples_per_input = 1;
    std::vector<std::string> inputs;
    SamplingDistributions geometry;
    TruncatedNormal focal_sigma_px{1.5, 0.25, 0.8, 2.5};
    ScatterConfig scatter;
    NoiseParams noise;
    OutputConfig output;

    void validate() const; // throws ConfigError
};

/// Parses a config file (JSON; // and /* */ comments are permitted).
PipelineConfig load_config(const std::string& path);

/// Parses config text; `origin` labels error messages.
PipelineConfig parse_config(const std::string& text, const std::string& origin);

/// Serializes a config as plain JSON.
std::string config_to_json(const PipelineConfig& config);

/// The annotated default configuration written by `collsim init-config`.
/// Parsing this text yields exactly the built-in defaults (unit tested).
std::string annotated_default_config();

std::string sigma_mode_name(SigmaMode mode);
SigmaMode sigma_mode_from_name(const std::string& name);

} // namespace collsim
