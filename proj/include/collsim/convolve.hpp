#pragma once

#include <vector>

#include "collsim/image.hpp"

namespace collsim {

/// Separable Gaussian kernel description. The radius is derived as
/// ceil(3 * sigma); truncated mass is restored by renormalization.
struct GaussianKernelSpec {
    double sigma = 1.0;
    int radius = 3;
};

/// Builds a spec from sigma, computing the radius. Throws ConfigError for
/// sigma <= 0 or non-finite sigma.
GaussianKernelSpec make_kernel_spec(double sigma);

/// 1-D weights of length 2 * radius + 1, symmetric, normalized to sum 1.
std::vector<double> gaussian_kernel(const GaussianKernelSpec& spec);

/// Separable Gaussian blur (horizontal then vertical pass) with replicate
/// (clamp-to-edge) boundary handling. Output dimensions equal the input.
/// Constant images pass through unchanged: a normalized kernel maps a
/// constant to itself, so the copy is the exact result.
Image convolve_gaussian(const Image& img, const GaussianKernelSpec& spec);

} // namespace collsim
