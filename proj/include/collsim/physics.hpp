#pragma once

#include <cstddef>

#include "collsim/convolve.hpp"
#include "collsim/image.hpp"
#include "collsim/mask.hpp"

namespace collsim {

/// Hyperparameters of the convolution-kernel scatter model. exponent_alpha
/// is the power-law exponent of the scatter potential and is unrelated to
/// the collimator damping factor (CollimatorSpec::damping).
struct ScatterParams {
    double exponent_alpha = 0.5;
    double exponent_beta = 1.0;
    double magnitude_c = 0.0;
    GaussianKernelSpec kernel{10.0, 30};
    double primary_intensity = 0.0; // I_0, must be > 0 when the ops run
};

/// Throws ConfigError unless c >= 0, beta >= 0, I_0 > 0 and the kernel is valid.
void validate_scatter_params(const ScatterParams& params, const char* what);

/// Collimator damping with focal-spot edge blur: the damped mask is blurred
/// and multiplied into the image. Output lies pointwise between
/// min(transmission) * input and input.
Image apply_collimation(const Image& img, const DampedMask& damped,
                        const GaussianKernelSpec& focal_blur);

/// Per-pixel scatter potential c * (I/I_0)^alpha * ln(I_0/I)^beta.
/// Intensities are clamped to [1e-6 * I_0, I_0] before evaluation, which
/// keeps the power and log terms real and finite; the result is >= 0 and
/// exactly 0 where I = I_0 (for beta > 0).
Image scatter_potential(const Image& img, const ScatterParams& params);

/// Scatter estimate: the potential blurred by the scatter kernel and scaled
/// by I_0. Positively homogeneous in c.
Image estimate_scatter(const Image& img, const ScatterParams& params);

/// Scatter correction of an acquired image: img - estimate_scatter(img),
/// clamped below at 0. The clamp count is reported through *clamped when
/// given; more than 0.1% clamped pixels signals a miscalibrated c.
Image remove_scatter(const Image& img, const ScatterParams& params,
                     std::size_t* clamped = nullptr);

/// Fraction threshold above which remove_scatter's clamping is flagged.
inline constexpr double kClampReportFraction = 0.001;

/// Full collimated-image recomposition: collimates the scatter-free image,
/// then adds the scatter estimate of the collimated result. Deep shadow
/// therefore keeps a scatter floor above pure damping.
Image simulate_collimated(const Image& img_scatter_free, const DampedMask& damped,
                          const GaussianKernelSpec& focal_blur, const ScatterParams& params);

} // namespace collsim
