#include "collsim/physics.hpp"

#include <cmath>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

void validate_scatter_params(const ScatterParams& p, const char* what) {
    if (!std::isfinite(p.exponent_alpha) || !std::isfinite(p.exponent_beta) ||
        !std::isfinite(p.magnitude_c) || !std::isfinite(p.primary_intensity))
        throw ConfigError(std::string(what) + ": scatter parameters must be finite");
    if (p.magnitude_c < 0.0)
        throw ConfigError(std::string(what) + ": magnitude_c must be >= 0");
    if (p.exponent_beta < 0.0)
        throw ConfigError(std::string(what) + ": exponent_beta must be >= 0");
    if (p.primary_intensity <= 0.0)
        throw ConfigError(std::string(what) + ": primary_intensity must be > 0");
    if (!std::isfinite(p.kernel.sigma) || p.kernel.sigma <= 0.0 || p.kernel.radius < 1)
        throw ConfigError(std::string(what) + ": scatter kernel spec invalid");
}

Image apply_collimation(const Image& img, const DampedMask& damped,
                        const GaussianKernelSpec& focal_blur) {
    validate_image(img, "apply_collimation");
    if (img.width != damped.width || img.height != damped.height)
        throw UsageError("apply_collimation: mask and image dimensions differ");
    const DampedMask blurred = blur_transmission(damped, focal_blur);
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        out.pixels[i] = blurred.transmission[i] * img.pixels[i];
    return out;
}

Image scatter_potential(const Image& img, const ScatterParams& p) {
    validate_image(img, "scatter_potential");
    validate_scatter_params(p, "scatter_potential");
    constexpr double kEps = 1e-6;

    Image out(img.width, img.height);
    const double i0 = p.primary_intensity;
    for (std::size_t i = 0; i < img.size(); ++i) {
        double ratio = img.pixels[i] / i0;
        if (ratio < kEps) ratio = kEps;
        if (ratio > 1.0) ratio = 1.0;
        // ln(I_0/I) = -ln(I/I_0) >= 0 on the clamped domain.
        out.pixels[i] = p.magnitude_c * std::pow(ratio, p.exponent_alpha) *
                        std::pow(-std::log(ratio), p.exponent_beta);
    }
    return out;
}

Image estimate_scatter(const Image& img, const ScatterParams& p) {
    Image potential = scatter_potential(img, p);
    Image blurred = convolve_gaussian(potential, p.kernel);
    for (double& v : blurred.pixels) v *= p.primary_intensity;
    return blurred;
}

Image remove_scatter(const Image& img, const ScatterParams& p, std::size_t* clamped) {
    const Image scatter = estimate_scatter(img, p);
    return subtract_clamped(img, scatter, clamped);
}

Image simulate_collimated(const Image& img_scatter_free, const DampedMask& damped,
                          const GaussianKernelSpec& focal_blur, const ScatterParams& params) {
    const Image collimated = apply_collimation(img_scatter_free, damped, focal_blur);
    return add(collimated, estimate_scatter(collimated, params));
}

} // namespace collsim
