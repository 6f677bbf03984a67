// collsim: deterministic collimator-shadow simulation for X-ray images.
//
// Subcommands: init-config, generate, simulate, calibrate, compare, phantom.
// Exit codes: 0 success, 1 runtime/partial failure, 2 configuration error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "collsim/config.hpp"
#include "collsim/errors.hpp"
#include "collsim/image_io.hpp"
#include "collsim/metrics.hpp"
#include "collsim/phantom.hpp"
#include "collsim/pipeline.hpp"

namespace {

using collsim::PipelineConfig;

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> samples_per_input;
    std::optional<std::string> out_dir;
};

void apply_overrides(PipelineConfig& cfg, const ConfigOverrides& ov) {
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.samples_per_input) cfg.samples_per_input = *ov.samples_per_input;
    if (ov.out_dir) cfg.output.dir = *ov.out_dir;
}

int cmd_init_config(const std::string& out_path, bool force) {
    const std::string text = collsim::annotated_default_config();
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return 0;
    }
    if (!force && std::filesystem::exists(out_path))
        throw collsim::IoError("refusing to overwrite " + out_path + " (use --force)");
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw collsim::IoError("cannot write " + out_path);
    out << text;
    out.flush();
    if (!out) throw collsim::IoError("write failed: " + out_path);
    std::cerr << "wrote " << out_path << "\n";
    return 0;
}

int cmd_generate(const std::string& config_path, const ConfigOverrides& ov, int jobs) {
    PipelineConfig cfg = collsim::load_config(config_path);
    apply_overrides(cfg, ov);
    const collsim::GenerateStats stats = collsim::generate_dataset(cfg, jobs);
    std::cout << "emitted " << stats.emitted << " sample(s), " << stats.failed
              << " failed; manifest: " << stats.manifest_path << "\n";
    return stats.failed > 0 ? 1 : 0;
}

int cmd_simulate(const std::string& input_path, const std::string& config_path,
                 const ConfigOverrides& ov, const std::string& out_path,
                 const std::string& mask_path, int input_index, int sample_index) {
    PipelineConfig cfg = collsim::load_config(config_path);
    apply_overrides(cfg, ov);
    const collsim::Image input = collsim::load_image(input_path);
    collsim::PipelineResult res =
        collsim::run_pipeline(input, cfg, input_index, sample_index, input_path);
    res.record.image_path = out_path;
    res.record.mask_path = mask_path;
    collsim::save_image(res.image, out_path, cfg.output.bit_depth);
    if (!mask_path.empty()) collsim::save_mask(res.mask, mask_path);
    std::cout << collsim::record_to_json(res.record) << "\n";
    return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& reference_path,
                  const std::string& phantom_kind, int phantom_size, double target,
                  double damping_override) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = collsim::load_config(config_path);

    const collsim::Image reference = reference_path.empty()
                                         ? collsim::make_phantom(phantom_kind, phantom_size)
                                         : collsim::load_image(reference_path);

    collsim::ScatterParams params;
    params.exponent_alpha = cfg.scatter.exponent_alpha;
    params.exponent_beta = cfg.scatter.exponent_beta;
    params.magnitude_c = cfg.scatter.magnitude_c;
    params.kernel = collsim::make_kernel_spec(cfg.scatter.kernel_sigma_frac *
                                              std::min(reference.width, reference.height));
    params.primary_intensity = cfg.scatter.primary_intensity > 0.0
                                   ? cfg.scatter.primary_intensity
                                   : collsim::percentile(reference, 0.995);

    const double damping = damping_override > 0.0 ? damping_override : cfg.geometry.damping.mean;
    const double target_fraction =
        target > 0.0 ? target : 0.5 * (cfg.scatter.band_low + cfg.scatter.band_high);

    const double c = collsim::calibrate_scatter_c(reference, params, damping, target_fraction);
    collsim::ScatterParams calibrated = params;
    calibrated.magnitude_c = c;
    const double achieved =
        collsim::deep_shadow_scatter_fraction(reference, calibrated, damping);

    nlohmann::json out{
        {"magnitude_c", c},
        {"achieved_fraction", achieved},
        {"target_fraction", target_fraction},
        {"damping", damping},
        {"primary_intensity", params.primary_intensity},
        {"kernel_sigma_px", params.kernel.sigma},
        {"in_band",
         achieved >= cfg.scatter.band_low && achieved <= cfg.scatter.band_high},
    };
    std::cout << out.dump(2) << "\n";
    return 0;
}

collsim::PatchSpec parse_patch(const std::string& text) {
    collsim::PatchSpec spec;
    int* fields[4] = {&spec.x, &spec.y, &spec.width, &spec.height};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t comma = text.find(',', pos);
        const std::string part =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            *fields[i] = std::stoi(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw collsim::UsageError("--patch expects x,y,width,height; got \"" + text + "\"");
        }
        if (i < 3) {
            if (comma == std::string::npos)
                throw collsim::UsageError("--patch expects x,y,width,height; got \"" + text + "\"");
            pos = comma + 1;
        } else if (comma != std::string::npos) {
            throw collsim::UsageError("--patch expects x,y,width,height; got \"" + text + "\"");
        }
    }
    return spec;
}

nlohmann::json report_json(const collsim::MetricReport& report) {
    nlohmann::json out;
    out["nmse"] = report.nmse;
    out["ssim"] = report.ssim;
    out["psnr_db"] = std::isinf(report.psnr) ? nlohmann::json("inf") : nlohmann::json(report.psnr);
    return out;
}

int cmd_compare(const std::string& ref_path, const std::string& test_path,
                const std::vector<std::string>& patch_args, double data_range, bool table) {
    const collsim::Image ref = collsim::load_image(ref_path);
    const collsim::Image test = collsim::load_image(test_path);
    collsim::SsimOptions options;
    options.data_range = data_range;

    nlohmann::json out;
    out["reference"] = ref_path;
    out["test"] = test_path;
    std::vector<std::pair<std::string, collsim::MetricReport>> rows;
    if (patch_args.empty()) {
        const collsim::MetricReport report = collsim::compare_images(ref, test, options);
        out["full"] = report_json(report);
        rows.emplace_back("full", report);
    } else {
        out["patches"] = nlohmann::json::array();
        for (const std::string& arg : patch_args) {
            const collsim::PatchSpec spec = parse_patch(arg);
            const collsim::MetricReport report = collsim::compare_patch(ref, test, spec, options);
            nlohmann::json entry = report_json(report);
            entry["patch"] = {{"x", spec.x}, {"y", spec.y}, {"width", spec.width},
                              {"height", spec.height}};
            out["patches"].push_back(entry);
            rows.emplace_back(arg, report);
        }
    }

    if (table) {
        std::cout << std::left << std::setw(24) << "region" << std::setw(14) << "nMSE"
                  << std::setw(14) << "SSIM" << "PSNR [dB]\n";
        for (const auto& [name, report] : rows)
            std::cout << std::left << std::setw(24) << name << std::setw(14) << report.nmse
                      << std::setw(14) << report.ssim << report.psnr << "\n";
    } else {
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

int cmd_phantom(const std::string& kind, int size, const std::string& out_path, double i0,
                int bit_depth) {
    const collsim::Image img = collsim::make_phantom(kind, size, i0);
    collsim::save_image(img, out_path, bit_depth);
    std::cerr << "wrote " << out_path << " (" << size << "x" << size << ", " << kind << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collsim: physics-based collimator shadow simulation for X-ray images"};
    app.require_subcommand(1);

    // init-config
    std::string init_out;
    bool init_force = false;
    CLI::App* init = app.add_subcommand("init-config", "Write the annotated default config");
    init->add_option("--out", init_out, "Destination path (default: stdout)");
    init->add_flag("--force", init_force, "Overwrite an existing file");

    // generate
    std::string gen_config;
    ConfigOverrides gen_ov;
    int gen_jobs = 0;
    std::uint64_t gen_seed = 0;
    int gen_samples = 0;
    std::string gen_out;
    CLI::App* gen = app.add_subcommand("generate", "Emit a dataset for every configured input");
    gen->add_option("--config", gen_config, "Pipeline config file")->required();
    CLI::Option* gen_seed_opt = gen->add_option("--seed", gen_seed, "Override the master seed");
    gen->add_option("--jobs", gen_jobs, "Worker threads (default: hardware concurrency)");
    CLI::Option* gen_out_opt = gen->add_option("--out", gen_out, "Override the output directory");
    CLI::Option* gen_samples_opt =
        gen->add_option("--samples-per-input", gen_samples, "Override samples per input");

    // simulate
    std::string sim_input, sim_config, sim_out, sim_mask;
    std::uint64_t sim_seed = 0;
    int sim_input_index = 0, sim_sample_index = 0;
    CLI::App* sim = app.add_subcommand("simulate", "Simulate a single image");
    sim->add_option("input", sim_input, "Open-field input image")->required();
    sim->add_option("--config", sim_config, "Pipeline config file")->required();
    sim->add_option("--out", sim_out, "Output image path")->required();
    sim->add_option("--mask", sim_mask, "Also write the label mask here");
    CLI::Option* sim_seed_opt = sim->add_option("--seed", sim_seed, "Override the master seed");
    sim->add_option("--input-index", sim_input_index, "Index in the seed derivation");
    sim->add_option("--sample-index", sim_sample_index, "Sample index in the seed derivation");

    // calibrate
    std::string cal_config, cal_reference, cal_kind = "gradient";
    int cal_size = 256;
    double cal_target = 0.0, cal_damping = 0.0;
    CLI::App* cal = app.add_subcommand("calibrate", "Calibrate the scatter magnitude c");
    cal->add_option("--config", cal_config, "Pipeline config file (defaults used if omitted)");
    cal->add_option("--reference", cal_reference, "Reference image (default: bundled phantom)");
    cal->add_option("--phantom-kind", cal_kind, "Bundled phantom kind (flat|disk|step|gradient)");
    cal->add_option("--phantom-size", cal_size, "Bundled phantom size in pixels");
    cal->add_option("--target", cal_target, "Target deep-shadow fraction (default: band middle)");
    cal->add_option("--damping", cal_damping, "Damping used for the fully collimated reference");

    // compare
    std::string cmp_ref, cmp_test;
    std::vector<std::string> cmp_patches;
    double cmp_range = 0.0;
    bool cmp_table = false;
    CLI::App* cmp = app.add_subcommand("compare", "nMSE/SSIM/PSNR between two images");
    cmp->add_option("reference", cmp_ref, "Reference image")->required();
    cmp->add_option("test", cmp_test, "Test image")->required();
    cmp->add_option("--patch", cmp_patches, "Patch as x,y,width,height (repeatable)")
        ->type_size(1)
        ->allow_extra_args(false);
    cmp->add_option("--data-range", cmp_range, "Dynamic range L (default: max of reference)");
    cmp->add_flag("--table", cmp_table, "Human-readable table instead of JSON");

    // phantom
    std::string ph_kind, ph_out;
    int ph_size = 256, ph_depth = 16;
    double ph_i0 = 10000.0;
    CLI::App* ph = app.add_subcommand("phantom", "Write a synthetic open-field phantom");
    ph->add_option("kind", ph_kind, "flat|disk|step|gradient")->required();
    ph->add_option("--out", ph_out, "Destination image path")->required();
    ph->add_option("--size", ph_size, "Side length in pixels");
    ph->add_option("--i0", ph_i0, "Primary intensity level");
    ph->add_option("--bit-depth", ph_depth, "8 or 16 (ignored for .rawf)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message
        return 2;
    }

    try {
        if (init->parsed()) return cmd_init_config(init_out, init_force);
        if (gen->parsed()) {
            if (*gen_seed_opt) gen_ov.seed = gen_seed;
            if (*gen_samples_opt) gen_ov.samples_per_input = gen_samples;
            if (*gen_out_opt) gen_ov.out_dir = gen_out;
            return cmd_generate(gen_config, gen_ov, gen_jobs);
        }
        if (sim->parsed()) {
            ConfigOverrides ov;
            if (*sim_seed_opt) ov.seed = sim_seed;
            return cmd_simulate(sim_input, sim_config, ov, sim_out, sim_mask, sim_input_index,
                                sim_sample_index);
        }
        if (cal->parsed())
            return cmd_calibrate(cal_config, cal_reference, cal_kind, cal_size, cal_target,
                                 cal_damping);
        if (cmp->parsed()) return cmd_compare(cmp_ref, cmp_test, cmp_patches, cmp_range, cmp_table);
        if (ph->parsed()) return cmd_phantom(ph_kind, ph_size, ph_out, ph_i0, ph_depth);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const collsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const collsim::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
