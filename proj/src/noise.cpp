#include "collsim/noise.hpp"

#include <cmath>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

void validate_noise_params(const NoiseParams& p, const char* what) {
    if (!std::isfinite(p.photon_rate_lambda) || p.photon_rate_lambda <= 0.0)
        throw ConfigError(std::string(what) + ": photon_rate_lambda must be > 0");
}

double compute_sigma_x(double alpha, double lambda, SigmaMode mode) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0)
        throw ConfigError("compute_sigma_x: damping alpha must be in (0, 1]");
    if (!std::isfinite(lambda) || lambda <= 0.0)
        throw ConfigError("compute_sigma_x: lambda must be > 0");
    switch (mode) {
    case SigmaMode::kVarianceMatching:
        return std::sqrt(alpha * lambda * (1.0 - alpha));
    case SigmaMode::kFullLambda:
        return std::sqrt(lambda * (1.0 - alpha));
    }
    throw ConfigError("compute_sigma_x: unknown mode");
}

Image add_compensation_noise(const Image& img, const DampedMask& blurred_mask,
                             const NoiseParams& params, double primary_intensity, Rng& rng) {
    validate_image(img, "add_compensation_noise");
    validate_noise_params(params, "add_compensation_noise");
    if (img.width != blurred_mask.width || img.height != blurred_mask.height)
        throw UsageError("add_compensation_noise: mask and image dimensions differ");
    if (!std::isfinite(primary_intensity) || primary_intensity <= 0.0)
        throw ConfigError("add_compensation_noise: primary_intensity must be > 0");

    const double lambda = params.photon_rate_lambda;
    const double gain = primary_intensity / lambda; // intensity per photon

    Image out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double alpha = blurred_mask.transmission[i];
        if (!(alpha > 0.0) || alpha > 1.0)
            throw UsageError("add_compensation_noise: mask transmission outside (0, 1]");
        const double sigma_photons = (params.mode == SigmaMode::kVarianceMatching)
                                         ? std::sqrt(alpha * lambda * (1.0 - alpha))
                                         : std::sqrt(lambda * (1.0 - alpha));
        const double z = rng.normal();
        const double v = img.pixels[i] + sigma_photons * gain * z;
        out.pixels[i] = v < 0.0 ? 0.0 : v;
    }
    return out;
}

} // namespace collsim
