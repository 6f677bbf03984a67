#include "collsim/config.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "collsim/errors.hpp"
#include "json_util.hpp"

namespace collsim {
namespace {

using nlohmann::json;
using namespace jsonutil;

TruncatedNormal scale_tuple(TruncatedNormal t, double factor) {
    t.mean *= factor;
    t.stddev *= factor;
    t.low *= factor;
    t.high *= factor;
    return t;
}

} // namespace

std::string sigma_mode_name(SigmaMode mode) {
    switch (mode) {
        case SigmaMode::kVarianceMatching: return "variance-matching";
        case SigmaMode::kFullLambda: return "full-lambda";
    }
    throw Error("unreachable sigma mode");
}

SigmaMode sigma_mode_from_name(const std::string& name) {
    if (name == "variance-matching") return SigmaMode::kVarianceMatching;
    if (name == "full-lambda") return SigmaMode::kFullLambda;
    throw ConfigError("unknown noise mode \"" + name +
                      "\" (expected \"variance-matching\" or \"full-lambda\")");
}

void PipelineConfig::validate() const {
    if (samples_per_input < 1) throw ConfigError("samples_per_input must be >= 1");
    validate_sampling_distributions(geometry);
    validate_truncated_normal(focal_sigma_px, "focal_blur.sigma_px");
    if (focal_sigma_px.low <= 0.0)
        throw ConfigError("focal_blur.sigma_px.low must be > 0");
    if (scatter.exponent_alpha < 0.0 || scatter.exponent_beta < 0.0)
        throw ConfigError("scatter exponents must be >= 0");
    if (scatter.magnitude_c < 0.0)
        throw ConfigError("scatter.magnitude_c must be >= 0");
    if (scatter.kernel_sigma_frac <= 0.0)
        throw ConfigError("scatter.kernel_sigma_frac must be > 0");
    if (scatter.primary_intensity < 0.0)
        throw ConfigError("scatter.primary_intensity must be >= 0 (0 = auto)");
    if (!(scatter.band_low > 0.0) || !(scatter.band_high > scatter.band_low))
        throw ConfigError("scatter band must satisfy 0 < band_low < band_high");
    if (!(noise.photon_rate_lambda > 0.0))
        throw ConfigError("noise.photon_rate_lambda must be > 0");
    if (output.bit_depth != 8 && output.bit_depth != 16)
        throw ConfigError("output.bit_depth must be 8 or 16");
    if (output.image_format != "pgm" && output.image_format != "rawf")
        throw ConfigError("output.image_format must be \"pgm\" or \"rawf\"");
    if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
}

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                           /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    PipelineConfig cfg;
    check_keys(root,
               {"seed", "samples_per_input", "inputs", "geometry", "focal_blur",
                "scatter", "noise", "output"},
               origin);

    cfg.seed = get_u64(root, "seed", origin);
    cfg.samples_per_input = get_int(root, "samples_per_input", origin);

    const json& inputs = member(root, "inputs", origin);
    if (!inputs.is_array()) fail(origin, "\"inputs\" must be an array of paths");
    for (const auto& item : inputs) {
        if (!item.is_string()) fail(origin, "\"inputs\" entries must be strings");
        cfg.inputs.push_back(item.get<std::string>());
    }

    {
        const json& g = member(root, "geometry", origin);
        const std::string path = origin + ".geometry";
        check_keys(g,
                   {"centroid_x_frac", "centroid_y_frac", "width_frac", "height_frac",
                    "rotation_deg", "corner_jitter_frac", "damping"},
                   path);
        cfg.geometry.centroid_x_frac = get_tuple(g, "centroid_x_frac", path);
        cfg.geometry.centroid_y_frac = get_tuple(g, "centroid_y_frac", path);
        cfg.geometry.width_frac = get_tuple(g, "width_frac", path);
        cfg.geometry.height_frac = get_tuple(g, "height_frac", path);
        cfg.geometry.rotation_rad = scale_tuple(get_tuple(g, "rotation_deg", path), kDegToRad);
        cfg.geometry.corner_jitter_frac = get_tuple(g, "corner_jitter_frac", path);
        cfg.geometry.damping = get_tuple(g, "damping", path);
    }

    {
        const json& f = member(root, "focal_blur", origin);
        const std::string path = origin + ".focal_blur";
        check_keys(f, {"sigma_px"}, path);
        cfg.focal_sigma_px = get_tuple(f, "sigma_px", path);
    }

    {
        const json& s = member(root, "scatter", origin);
        const std::string path = origin + ".scatter";
        check_keys(s,
                   {"exponent_alpha", "exponent_beta", "magnitude_c", "kernel_sigma_frac",
                    "primary_intensity", "band_low", "band_high"},
                   path);
        cfg.scatter.exponent_alpha = get_number(s, "exponent_alpha", path);
        cfg.scatter.exponent_beta = get_number(s, "exponent_beta", path);
        cfg.scatter.magnitude_c = get_number(s, "magnitude_c", path);
        cfg.scatter.kernel_sigma_frac = get_number(s, "kernel_sigma_frac", path);
        cfg.scatter.primary_intensity = get_number(s, "primary_intensity", path);
        cfg.scatter.band_low = get_number(s, "band_low", path);
        cfg.scatter.band_high = get_number(s, "band_high", path);
    }

    {
        const json& n = member(root, "noise", origin);
        const std::string path = origin + ".noise";
        check_keys(n, {"enabled", "photon_rate_lambda", "mode"}, path);
        cfg.noise.enabled = get_bool(n, "enabled", path);
        cfg.noise.photon_rate_lambda = get_number(n, "photon_rate_lambda", path);
        cfg.noise.mode = sigma_mode_from_name(get_string(n, "mode", path));
    }

    {
        const json& o = member(root, "output", origin);
        const std::string path = origin + ".output";
        check_keys(o, {"dir", "bit_depth", "image_format"}, path);
        cfg.output.dir = get_string(o, "dir", path);
        cfg.output.bit_depth = get_int(o, "bit_depth", path);
        cfg.output.image_format = get_string(o, "image_format", path);
    }

    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string config_to_json(const PipelineConfig& config) {
    json root;
    root["seed"] = config.seed;
    root["samples_per_input"] = config.samples_per_input;
    root["inputs"] = config.inputs;
    root["geometry"] = json{
        {"centroid_x_frac", tuple_to_json(config.geometry.centroid_x_frac)},
        {"centroid_y_frac", tuple_to_json(config.geometry.centroid_y_frac)},
        {"width_frac", tuple_to_json(config.geometry.width_frac)},
        {"height_frac", tuple_to_json(config.geometry.height_frac)},
        {"rotation_deg", tuple_to_json(scale_tuple(config.geometry.rotation_rad, 1.0 / kDegToRad))},
        {"corner_jitter_frac", tuple_to_json(config.geometry.corner_jitter_frac)},
        {"damping", tuple_to_json(config.geometry.damping)},
    };
    root["focal_blur"] = json{{"sigma_px", tuple_to_json(config.focal_sigma_px)}};
    root["scatter"] = json{
        {"exponent_alpha", config.scatter.exponent_alpha},
        {"exponent_beta", config.scatter.exponent_beta},
        {"magnitude_c", config.scatter.magnitude_c},
        {"kernel_sigma_frac", config.scatter.kernel_sigma_frac},
        {"primary_intensity", config.scatter.primary_intensity},
        {"band_low", config.scatter.band_low},
        {"band_high", config.scatter.band_high},
    };
    root["noise"] = json{
        {"enabled", config.noise.enabled},
        {"photon_rate_lambda", config.noise.photon_rate_lambda},
        {"mode", sigma_mode_name(config.noise.mode)},
    };
    root["output"] = json{
        {"dir", config.output.dir},
        {"bit_depth", config.output.bit_depth},
        {"image_format", config.output.image_format},
    };
    return root.dump(2) + "\n";
}

std::string annotated_default_config() {
    // Keep value literals in sync with the struct defaults; a unit test
    // parses this text and requires exact equality with PipelineConfig{}.
    std::ostringstream out;
    out <<
R"(// collsim pipeline configuration.
// JSON with // and /* */ comments. All values shown are the built-in
// defaults; `collsim generate` refuses to run until `inputs` is non-empty.
{
  // Master seed: (seed, input index, sample index) fully determine
  // every random draw, so reruns reproduce the dataset bit for bit.
  "seed": 20240915,

  // Collimator draws per input image.
  "samples_per_input": 1,

  // Input radiographs (.pgm or .rawf), resolved relative to the
  // working directory.
  "inputs": [],

  // Truncated-normal tuples {mean, stddev, low, high} for the sampled
  // collimator geometry. *_frac values are fractions of the image size
  // (width, height, or diagonal for the corner jitter), so one config
  // serves inputs of any resolution.
  "geometry": {
    "centroid_x_frac":    { "mean": 0.5,  "stddev": 0.12,  "low": 0.1,   "high": 0.9 },
    "centroid_y_frac":    { "mean": 0.5,  "stddev": 0.12,  "low": 0.1,   "high": 0.9 },
    "width_frac":         { "mean": 0.55, "stddev": 0.18,  "low": 0.2,   "high": 0.9 },
    "height_frac":        { "mean": 0.55, "stddev": 0.18,  "low": 0.2,   "high": 0.9 },
    "rotation_deg":       { "mean": 0.0,  "stddev": 6.0,   "low": -15.0, "high": 15.0 },
    "corner_jitter_frac": { "mean": 0.0,  "stddev": 0.01,  "low": -0.03, "high": 0.03 },
    // Shadow transmission: 2-4% of the unobstructed intensity.
    "damping":            { "mean": 0.03, "stddev": 0.005, "low": 0.02,  "high": 0.04 }
  },

  // Focal-spot penumbra: Gaussian blur of the damped mask, sigma in
  // pixels, sampled per image.
  "focal_blur": {
    "sigma_px": { "mean": 1.5, "stddev": 0.25, "low": 0.8, "high": 2.5 }
  },

  // Convolution scatter model S_p = c * (I/I0)^a * ln(I0/I)^b.
  "scatter": {
    "exponent_alpha": 0.5,
    "exponent_beta": 1.0,
    // Calibrated so deep-shadow scatter lands mid-band on the bundled
    // gradient phantom; re-derive with `collsim calibrate`.
    "magnitude_c": )" << fmt_double(ScatterConfig::kDefaultMagnitude) << R"(,
    // Scatter kernel sigma as a fraction of min(image width, height).
    "kernel_sigma_frac": 0.04,
    // Unobstructed primary intensity I0; 0 = derive per image as the
    // 99.5th-percentile pixel value.
    "primary_intensity": 0.0,
    // Accepted deep-shadow scatter fraction band (of I0).
    "band_low": 0.012,
    "band_high": 0.02
  },

  // SNR-restoring compensation noise. sigma_x per pixel:
  //   variance-matching: sqrt(alpha * lambda * (1 - alpha))   (default)
  //   full-lambda:       sqrt(lambda * (1 - alpha))
  "noise": {
    "enabled": true,
    "photon_rate_lambda": 10000.0,
    "mode": "variance-matching"
  },

  "output": {
    "dir": "out",
    "bit_depth": 16,       // 8 or 16 (PGM maxval 255 / 65535)
    "image_format": "pgm"  // pgm | rawf (32-bit float raster)
  }
}
)";
    return out.str();
}

} // namespace collsim
