#include "collsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "collsim/convolve.hpp"
#include "collsim/errors.hpp"
#include "collsim/image_io.hpp"
#include "collsim/random.hpp"
#include "json_util.hpp"

namespace collsim {
namespace {

using nlohmann::json;
using namespace jsonutil;

json spec_to_json(const CollimatorSpec& s) {
    return json{
        {"centroid_x", s.centroid_x}, {"centroid_y", s.centroid_y},
        {"width", s.width},           {"height", s.height},
        {"rotation_rad", s.rotation}, {"corner_offsets", s.corner_offsets},
        {"damping", s.damping},
    };
}

CollimatorSpec spec_from_json(const json& j, const std::string& origin) {
    check_keys(j,
               {"centroid_x", "centroid_y", "width", "height", "rotation_rad",
                "corner_offsets", "damping"},
               origin);
    CollimatorSpec s;
    s.centroid_x = get_number(j, "centroid_x", origin);
    s.centroid_y = get_number(j, "centroid_y", origin);
    s.width = get_number(j, "width", origin);
    s.height = get_number(j, "height", origin);
    s.rotation = get_number(j, "rotation_rad", origin);
    const json& offsets = member(j, "corner_offsets", origin);
    if (!offsets.is_array() || offsets.size() != 8)
        fail(origin, "\"corner_offsets\" must be an array of 8 numbers");
    for (std::size_t i = 0; i < 8; ++i) {
        if (!offsets[i].is_number()) fail(origin, "\"corner_offsets\" must hold numbers");
        s.corner_offsets[i] = offsets[i].get<double>();
    }
    s.damping = get_number(j, "damping", origin);
    return s;
}

std::string sanitize_stem(const std::string& stem) {
    std::string out;
    for (char c : stem) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("input") : out;
}

std::string sample_basename(const std::string& input_path, int input_index, int sample_index) {
    const std::string stem = std::filesystem::path(input_path).stem().string();
    std::ostringstream name;
    name << 'i' << std::setw(3) << std::setfill('0') << input_index << '_'
         << sanitize_stem(stem) << "_s" << std::setw(2) << std::setfill('0') << sample_index;
    return name.str();
}

} // namespace

std::string record_to_json(const SampleRecord& r) {
    json root;
    root["input_path"] = r.input_path;
    root["input_index"] = r.input_index;
    root["sample_index"] = r.sample_index;
    root["master_seed"] = r.master_seed;
    root["geometry_seed"] = r.geometry_seed;
    root["noise_seed"] = r.noise_seed;
    root["image_path"] = r.image_path;
    root["mask_path"] = r.mask_path;
    root["spec"] = spec_to_json(r.spec);
    root["focal_sigma_px"] = r.focal_sigma_px;
    root["focal_radius_px"] = r.focal_radius_px;
    root["scatter"] = json{
        {"exponent_alpha", r.scatter.exponent_alpha},
        {"exponent_beta", r.scatter.exponent_beta},
        {"magnitude_c", r.scatter.magnitude_c},
        {"kernel_sigma_px", r.scatter.kernel.sigma},
        {"kernel_radius_px", r.scatter.kernel.radius},
        {"primary_intensity", r.scatter.primary_intensity},
    };
    root["noise"] = json{
        {"enabled", r.noise.enabled},
        {"photon_rate_lambda", r.noise.photon_rate_lambda},
        {"mode", sigma_mode_name(r.noise.mode)},
    };
    root["scatter_clamped_pixels"] = static_cast<std::uint64_t>(r.scatter_clamped_pixels);
    root["mask_rle"] = json{{"first", static_cast<int>(r.mask_rle.first)},
                            {"runs", r.mask_rle.runs}};
    return root.dump(); // single line, keys in stable (sorted) order
}

SampleRecord record_from_json(const std::string& line, const std::string& origin) {
    json root;
    try {
        root = json::parse(line);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    check_keys(root,
               {"input_path", "input_index", "sample_index", "master_seed", "geometry_seed",
                "noise_seed", "image_path", "mask_path", "spec", "focal_sigma_px",
                "focal_radius_px", "scatter", "noise", "scatter_clamped_pixels", "mask_rle"},
               origin);

    SampleRecord r;
    r.input_path = get_string(root, "input_path", origin);
    r.input_index = get_int(root, "input_index", origin);
    r.sample_index = get_int(root, "sample_index", origin);
    r.master_seed = get_u64(root, "master_seed", origin);
    r.geometry_seed = get_u64(root, "geometry_seed", origin);
    r.noise_seed = get_u64(root, "noise_seed", origin);
    r.image_path = get_string(root, "image_path", origin);
    r.mask_path = get_string(root, "mask_path", origin);
    r.spec = spec_from_json(member(root, "spec", origin), origin + ".spec");
    r.focal_sigma_px = get_number(root, "focal_sigma_px", origin);
    r.focal_radius_px = get_int(root, "focal_radius_px", origin);

    {
        const json& s = member(root, "scatter", origin);
        const std::string path = origin + ".scatter";
        check_keys(s,
                   {"exponent_alpha", "exponent_beta", "magnitude_c", "kernel_sigma_px",
                    "kernel_radius_px", "primary_intensity"},
                   path);
        r.scatter.exponent_alpha = get_number(s, "exponent_alpha", path);
        r.scatter.exponent_beta = get_number(s, "exponent_beta", path);
        r.scatter.magnitude_c = get_number(s, "magnitude_c", path);
        r.scatter.kernel.sigma = get_number(s, "kernel_sigma_px", path);
        r.scatter.kernel.radius = get_int(s, "kernel_radius_px", path);
        r.scatter.primary_intensity = get_number(s, "primary_intensity", path);
    }
    {
        const json& n = member(root, "noise", origin);
        const std::string path = origin + ".noise";
        check_keys(n, {"enabled", "photon_rate_lambda", "mode"}, path);
        r.noise.enabled = get_bool(n, "enabled", path);
        r.noise.photon_rate_lambda = get_number(n, "photon_rate_lambda", path);
        r.noise.mode = sigma_mode_from_name(get_string(n, "mode", path));
    }
    r.scatter_clamped_pixels = static_cast<std::size_t>(get_u64(root, "scatter_clamped_pixels", origin));
    {
        const json& m = member(root, "mask_rle", origin);
        const std::string path = origin + ".mask_rle";
        check_keys(m, {"first", "runs"}, path);
        const int first = get_int(m, "first", path);
        if (first != 0 && first != 1) fail(path, "\"first\" must be 0 or 1");
        r.mask_rle.first = static_cast<std::uint8_t>(first);
        const json& runs = member(m, "runs", path);
        if (!runs.is_array()) fail(path, "\"runs\" must be an array");
        for (const auto& v : runs) {
            if (!v.is_number_unsigned() && !v.is_number_integer())
                fail(path, "\"runs\" must hold non-negative integers");
            r.mask_rle.runs.push_back(v.get<std::uint64_t>());
        }
    }
    return r;
}

PipelineResult run_pipeline(const Image& input, const PipelineConfig& config,
                            int input_index, int sample_index,
                            const std::string& input_path) {
    validate_image(input, "pipeline input");
    config.validate();
    if (input_index < 0 || sample_index < 0)
        throw UsageError("run_pipeline: indices must be >= 0");

    SampleRecord rec;
    rec.input_path = input_path;
    rec.input_index = input_index;
    rec.sample_index = sample_index;
    rec.master_seed = config.seed;
    const auto in_idx = static_cast<std::uint64_t>(input_index);
    const auto s_idx = static_cast<std::uint64_t>(sample_index);
    rec.geometry_seed = derive_seed(config.seed, {in_idx, s_idx, kStageGeometry});
    rec.noise_seed = derive_seed(config.seed, {in_idx, s_idx, kStageNoise});

    // Stage 1: draw geometry (spec first, then the focal sigma, from the
    // same stream) and rasterize the sharp label.
    Rng geometry_rng(rec.geometry_seed);
    rec.spec = sample_spec(config.geometry, input.width, input.height, geometry_rng);
    rec.focal_sigma_px = sample_truncated_normal(config.focal_sigma_px, geometry_rng);
    const GaussianKernelSpec focal = make_kernel_spec(rec.focal_sigma_px);
    rec.focal_radius_px = focal.radius;
    BinaryMask mask = rasterize(rec.spec, input.width, input.height);
    rec.mask_rle = rle_encode(mask);

    // Resolve the scatter model for this input.
    ScatterParams params;
    params.exponent_alpha = config.scatter.exponent_alpha;
    params.exponent_beta = config.scatter.exponent_beta;
    params.magnitude_c = config.scatter.magnitude_c;
    params.kernel =
        make_kernel_spec(config.scatter.kernel_sigma_frac * std::min(input.width, input.height));
    params.primary_intensity = config.scatter.primary_intensity > 0.0
                                   ? config.scatter.primary_intensity
                                   : percentile(input, 0.995);
    validate_scatter_params(params, "pipeline scatter");
    rec.scatter = params;
    rec.noise = config.noise;

    // Stage 2: remove the input's own scatter estimate.
    const Image scatter_free = remove_scatter(input, params, &rec.scatter_clamped_pixels);

    // Stage 3: collimate with the focal-blurred damped mask, then re-add the
    // scatter the collimated image itself would produce.
    const DampedMask damped = mask_to_damped(mask, rec.spec.damping);
    const DampedMask blurred = blur_transmission(damped, focal);
    Image collimated(input.width, input.height);
    for (std::size_t i = 0; i < collimated.size(); ++i)
        collimated.pixels[i] = blurred.transmission[i] * scatter_free.pixels[i];
    Image result = add(collimated, estimate_scatter(collimated, params));

    // Stage 4: SNR compensation noise in the damped regions.
    if (config.noise.enabled) {
        Rng noise_rng(rec.noise_seed);
        result = add_compensation_noise(result, blurred, config.noise,
                                        params.primary_intensity, noise_rng);
    }

    return PipelineResult{std::move(result), std::move(mask), std::move(rec)};
}

double deep_shadow_scatter_fraction(const Image& reference, const ScatterParams& params,
                                    double damping) {
    validate_image(reference, "calibration reference");
    validate_scatter_params(params, "calibration");
    if (!(damping > 0.0) || damping > 1.0)
        throw ConfigError("deep_shadow_scatter_fraction: damping must be in (0, 1]");
    Image collimated(reference.width, reference.height);
    for (std::size_t i = 0; i < collimated.size(); ++i)
        collimated.pixels[i] = damping * reference.pixels[i];
    const Image scatter = estimate_scatter(collimated, params);
    return mean_value(scatter) / params.primary_intensity;
}

double calibrate_scatter_c(const Image& reference, const ScatterParams& params,
                           double damping, double target_fraction) {
    if (target_fraction < 0.0)
        throw ConfigError("calibrate_scatter_c: target fraction must be >= 0");
    if (target_fraction == 0.0) return 0.0;

    auto fraction_at = [&](double c) {
        ScatterParams p = params;
        p.magnitude_c = c;
        return deep_shadow_scatter_fraction(reference, p, damping);
    };

    constexpr double kRelTol = 0.01;
    const double unit = fraction_at(1.0);
    if (!std::isfinite(unit) || unit <= 0.0) {
        std::ostringstream msg;
        msg << "calibrate_scatter_c: scatter fraction at c=1 is " << unit
            << "; the reference image cannot produce scatter (all pixels at I_0"
               " or zero?)";
        throw CalibrationError(msg.str());
    }

    // The fraction is linear in c, so target/unit brackets immediately; the
    // doubling loop guards against rounding at extreme magnitudes.
    double lo = 0.0;
    double hi = std::max(target_fraction / unit, 1e-12);
    int doublings = 0;
    while (fraction_at(hi) < target_fraction) {
        hi *= 2.0;
        if (++doublings > 64) {
            std::ostringstream msg;
            msg << "calibrate_scatter_c: could not bracket target " << target_fraction
                << "; fraction at c=" << hi << " is " << fraction_at(hi);
            throw CalibrationError(msg.str());
        }
    }

    double mid = hi;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f = fraction_at(mid);
        if (std::abs(f - target_fraction) <= kRelTol * target_fraction) return mid;
        if (f < target_fraction)
            lo = mid;
        else
            hi = mid;
    }
    std::ostringstream msg;
    msg << "calibrate_scatter_c: bisection failed to converge; last c=" << mid
        << " gave fraction " << fraction_at(mid) << " for target " << target_fraction;
    throw CalibrationError(msg.str());
}

GenerateStats generate_dataset(const PipelineConfig& config, int jobs) {
    config.validate();
    if (config.inputs.empty())
        throw ConfigError("generate: config.inputs must list at least one image");

    namespace fs = std::filesystem;
    const fs::path out_dir(config.output.dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    GenerateStats stats;
    std::mutex log_mutex;

    const int n_inputs = static_cast<int>(config.inputs.size());
    std::vector<std::optional<Image>> loaded(static_cast<std::size_t>(n_inputs));
    for (int i = 0; i < n_inputs; ++i) {
        try {
            loaded[static_cast<std::size_t>(i)] = load_image(config.inputs[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
            stats.failed += config.samples_per_input;
            std::cerr << "[skip] input " << config.inputs[static_cast<std::size_t>(i)] << ": "
                      << e.what() << "\n";
        }
    }

    struct Task {
        int input;
        int sample;
    };
    std::vector<Task> tasks;
    for (int i = 0; i < n_inputs; ++i) {
        if (!loaded[static_cast<std::size_t>(i)]) continue;
        for (int s = 0; s < config.samples_per_input; ++s) tasks.push_back(Task{i, s});
    }

    // Tasks are independent: seeds derive from (master, input, sample), and
    // each writes distinct files, so the worker count cannot alter outputs.
    std::vector<std::string> lines(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    const std::string image_ext = config.output.image_format == "rawf" ? ".rawf" : ".pgm";

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task task = tasks[t];
            const std::string& in_path = config.inputs[static_cast<std::size_t>(task.input)];
            try {
                PipelineResult res =
                    run_pipeline(*loaded[static_cast<std::size_t>(task.input)], config,
                                 task.input, task.sample, in_path);
                const std::string base = sample_basename(in_path, task.input, task.sample);
                res.record.image_path = base + image_ext;
                res.record.mask_path = base + "_mask.pgm";
                save_image(res.image, (out_dir / res.record.image_path).string(),
                           config.output.bit_depth);
                save_mask(res.mask, (out_dir / res.record.mask_path).string());
                lines[t] = record_to_json(res.record);
            } catch (const std::exception& e) {
                failures.fetch_add(1);
                const std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "[skip] input " << in_path << " sample " << task.sample << ": "
                          << e.what() << "\n";
            }
        }
    };

    int n_jobs = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_jobs = std::max(1, std::min<int>(n_jobs, static_cast<int>(tasks.size() ? tasks.size() : 1)));
    if (n_jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_jobs));
        for (int i = 0; i < n_jobs; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    stats.failed += failures.load();

    // Manifest lines are emitted in task order (input-major), independent of
    // which worker produced them.
    const fs::path manifest = out_dir / "manifest.jsonl";
    std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + manifest.string());
    for (const std::string& line : lines) {
        if (line.empty()) continue;
        out << line << "\n";
        ++stats.emitted;
    }
    out.flush();
    if (!out) throw IoError("manifest write failed: " + manifest.string());
    stats.manifest_path = manifest.string();
    return stats;
}

} // namespace collsim
