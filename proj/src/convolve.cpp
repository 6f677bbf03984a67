#include "collsim/convolve.hpp"

#include <algorithm>
#include <cmath>

#include "collsim/errors.hpp"

namespace collsim {

GaussianKernelSpec make_kernel_spec(double sigma) {
    if (!std::isfinite(sigma) || sigma <= 0.0)
        throw ConfigError("gaussian kernel: sigma must be finite and > 0");
    GaussianKernelSpec spec;
    spec.sigma = sigma;
    spec.radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (spec.radius < 1) spec.radius = 1;
    return spec;
}

std::vector<double> gaussian_kernel(const GaussianKernelSpec& spec) {
    if (!std::isfinite(spec.sigma) || spec.sigma <= 0.0 || spec.radius < 1)
        throw ConfigError("gaussian kernel: invalid spec");
    const int n = 2 * spec.radius + 1;
    std::vector<double> w(n);
    const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = static_cast<double>(i - spec.radius);
        w[i] = std::exp(-d * d * inv2s2);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

Image convolve_gaussian(const Image& img, const GaussianKernelSpec& spec) {
    validate_image(img, "convolve_gaussian");
    if (img.is_constant()) return img;

    const std::vector<double> w = gaussian_kernel(spec);
    const int r = spec.radius;
    const int width = img.width;
    const int height = img.height;

    Image tmp(width, height);
    for (int y = 0; y < height; ++y) {
        const double* src = &img.pixels[static_cast<std::size_t>(y) * width];
        double* dst = &tmp.pixels[static_cast<std::size_t>(y) * width];
        for (int x = 0; x < width; ++x) {
            double sum = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int xs = std::clamp(x + k, 0, width - 1);
                sum += w[k + r] * src[xs];
            }
            dst[x] = sum;
        }
    }

    Image out(width, height);
    for (int y = 0; y < height; ++y) {
        double* dst = &out.pixels[static_cast<std::size_t>(y) * width];
        for (int x = 0; x < width; ++x) {
            double sum = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int ys = std::clamp(y + k, 0, height - 1);
                sum += w[k + r] * tmp.pixels[static_cast<std::size_t>(ys) * width + x];
            }
            dst[x] = sum;
        }
    }
    return out;
}

} // namespace collsim
