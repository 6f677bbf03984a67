#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "collsim/config.hpp"
#include "collsim/image.hpp"
#include "collsim/mask.hpp"
#include "collsim/noise.hpp"
#include "collsim/physics.hpp"

namespace collsim {

/// Full provenance of one emitted sample: parameters as actually drawn plus
/// the seeds they were drawn from. A record and its input image suffice to
/// regenerate the sample bit-identically.
struct SampleRecord {
    std::string input_path;
    int input_index = 0;
    int sample_index = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t geometry_seed = 0; // stream for spec + focal sigma draws
    std::uint64_t noise_seed = 0;
    std::string image_path; // relative to the manifest's directory
    std::string mask_path;
    CollimatorSpec spec;
    double focal_sigma_px = 0.0;
    int focal_radius_px = 0;
    ScatterParams scatter; // kernel width and I_0 resolved for this input
    NoiseParams noise;
    std::size_t scatter_clamped_pixels = 0;
    MaskRle mask_rle;
};

/// One-line JSON form used in the manifest (stable, documented format).
std::string record_to_json(const SampleRecord& record);
SampleRecord record_from_json(const std::string& line, const std::string& origin = "record");

struct PipelineResult {
    Image image;
    BinaryMask mask; // sharp geometric label, pre-blur
    SampleRecord record;
};

/// Runs the three simulation stages on one open-field input:
///   1. draw a CollimatorSpec and the focal sigma from the geometry stream
///      (seed = derive(master, input_index, sample_index, geometry tag)),
///      rasterize the label mask;
///   2. remove the input's own scatter estimate (I_sc = I - S_e(I));
///   3. collimate with the focal-blurred damped mask and re-add the scatter
///      of the collimated image (I_s = L(I_sc) + S_e(L(I_sc)));
///   4. add SNR compensation noise from the noise stream, if enabled.
/// The scatter kernel width and I_0 are resolved per input (see ScatterConfig).
PipelineResult run_pipeline(const Image& input, const PipelineConfig& config,
                            int input_index, int sample_index,
                            const std::string& input_path = {});

/// Mean scatter fraction of I_0 inside a fully collimated frame: the
/// reference is damped everywhere by `damping` and the mean of its scatter
/// estimate is taken over the whole frame. Linear in params.magnitude_c.
double deep_shadow_scatter_fraction(const Image& reference, const ScatterParams& params,
                                    double damping);

/// Calibrates the scatter magnitude c so the deep-shadow scatter fraction
/// hits target_fraction within 1% relative, by bracketing + bisection.
/// target 0 returns 0. Throws CalibrationError with diagnostics if no
/// bracket can be established (e.g. the reference is all zeros).
double calibrate_scatter_c(const Image& reference, const ScatterParams& params,
                           double damping, double target_fraction);

struct GenerateStats {
    int emitted = 0;
    int failed = 0;
    std::string manifest_path;
};

/// Emits image/mask/record triples for every (input, sample index) pair into
/// config.output.dir and writes manifest.jsonl (one record per line, ordered
/// by input then sample index). Per-sample seeds derive from (master seed,
/// input index, sample index), so outputs are byte-identical regardless of
/// `jobs`. Failing pairs are skipped and logged; the caller maps
/// stats.failed > 0 to a nonzero exit.
GenerateStats generate_dataset(const PipelineConfig& config, int jobs);

} // namespace collsim
