#pragma once

#include "collsim/convolve.hpp"
#include "collsim/image.hpp"

namespace collsim {

/// Rectangular patch, top-left anchored; must lie fully inside both images.
struct PatchSpec {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

struct MetricReport {
    double nmse = 0.0;
    double ssim = 0.0;
    double psnr = 0.0; // dB, +infinity for identical images
};

Image extract_patch(const Image& img, const PatchSpec& patch);

/// Normalized mean-squared error mean((ref - test)^2) / mean(ref^2).
/// Order-sensitive (the reference sits in the denominator). Throws
/// UsageError for an all-zero reference.
double nmse(const Image& reference, const Image& test);

/// Options for ssim(); defaults are the standard constants with an
/// 11-pixel Gaussian window (sigma = 1.5). data_range <= 0 resolves to the
/// maximum of the reference image.
struct SsimOptions {
    GaussianKernelSpec window{1.5, 5};
    double k1 = 0.01;
    double k2 = 0.03;
    double data_range = 0.0;
};

/// Mean structural similarity over the local SSIM map (Gaussian-weighted
/// local statistics). Returns exactly 1.0 for identical images; symmetric
/// in its image arguments. Throws UsageError when either dimension is
/// smaller than the window.
double ssim(const Image& reference, const Image& test, const SsimOptions& options = {});

/// Peak SNR in dB: 10 * log10(data_range^2 / MSE). data_range <= 0 resolves
/// to the maximum of the reference image; identical images yield +infinity.
double psnr(const Image& reference, const Image& test, double data_range = 0.0);

/// All three measures over the full images.
MetricReport compare_images(const Image& reference, const Image& test,
                            const SsimOptions& options = {});

/// All three measures over one patch of both images.
MetricReport compare_patch(const Image& reference, const Image& test, const PatchSpec& patch,
                           const SsimOptions& options = {});

} // namespace collsim
