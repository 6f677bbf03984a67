#pragma once

#include "collsim/image.hpp"
#include "collsim/mask.hpp"
#include "collsim/random.hpp"

namespace collsim {

/// Formula for the compensation sigma.
///
/// kVarianceMatching uses sigma_x = sqrt(alpha * lambda * (1 - alpha)), the
/// value that makes Var[alpha * Poisson(lambda) + N(0, sigma_x^2)] equal
/// Var[Poisson(alpha * lambda)]. kFullLambda keeps the stronger alternative
/// sqrt(lambda * (1 - alpha)), which skips the alpha thinning factor.
enum class SigmaMode {
    kVarianceMatching,
    kFullLambda,
};

struct NoiseParams {
    double photon_rate_lambda = 1e4; // mean open-field photon count per pixel
    SigmaMode mode = SigmaMode::kVarianceMatching;
    bool enabled = true;
};

void validate_noise_params(const NoiseParams& params, const char* what);

/// Standard deviation (in photon units) of the zero-mean Gaussian that
/// restores Poisson SNR after damping by alpha. Returns 0 when alpha = 1.
/// Throws ConfigError for alpha outside (0, 1] or lambda <= 0.
double compute_sigma_x(double damping_alpha, double lambda, SigmaMode mode);

/// Adds the SNR compensation noise. Each pixel's local alpha comes from the
/// blurred transmission map, sigma_x is converted from photon to intensity
/// units by the gain I_0 / lambda, and an independent N(0, sigma^2) draw is
/// added; results clamp at 0. Pixels with alpha = 1 are untouched. Every
/// pixel consumes exactly one normal draw (2 engine words), so the noise
/// field depends only on the seed and image size.
Image add_compensation_noise(const Image& img, const DampedMask& blurred_mask,
                             const NoiseParams& params, double primary_intensity, Rng& rng);

} // namespace collsim
