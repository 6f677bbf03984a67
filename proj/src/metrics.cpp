#include "collsim/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

Image extract_patch(const Image& img, const PatchSpec& p) {
    if (p.width < 1 || p.height < 1) throw UsageError("extract_patch: patch extent must be >= 1");
    if (p.x < 0 || p.y < 0 || p.x + p.width > img.width || p.y + p.height > img.height)
        throw UsageError("extract_patch: patch extends beyond the image");
    Image out(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) out.at(x, y) = img.at(p.x + x, p.y + y);
    return out;
}

namespace {

void require_same_dims(const Image& a, const Image& b, const char* what) {
    if (!a.same_dims(b)) throw UsageError(std::string(what) + ": image dimensions differ");
}

double mean_squared_error(const Image& a, const Image& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

double resolve_data_range(const Image& reference, double data_range, const char* what) {
    const double range = data_range > 0.0 ? data_range : max_value(reference);
    if (!(range > 0.0)) throw UsageError(std::string(what) + ": data range must be > 0");
    return range;
}

} // namespace

double nmse(const Image& reference, const Image& test) {
    require_same_dims(reference, test, "nmse");
    double ref_sq = 0.0;
    for (double v : reference.pixels) ref_sq += v * v;
    ref_sq /= static_cast<double>(reference.size());
    if (ref_sq == 0.0) throw UsageError("nmse: all-zero reference leaves the normalization undefined");
    return mean_squared_error(reference, test) / ref_sq;
}

double ssim(const Image& reference, const Image& test, const SsimOptions& opt) {
    require_same_dims(reference, test, "ssim");
    const int window = 2 * opt.window.radius + 1;
    if (reference.width < window || reference.height < window)
        throw UsageError("ssim: images smaller than the window");

    const double range = resolve_data_range(reference, opt.data_range, "ssim");
    const double c1 = (opt.k1 * range) * (opt.k1 * range);
    const double c2 = (opt.k2 * range) * (opt.k2 * range);

    const Image mu_x = convolve_gaussian(reference, opt.window);
    const Image mu_y = convolve_gaussian(test, opt.window);
    const Image xx = convolve_gaussian(multiply(reference, reference), opt.window);
    const Image yy = convolve_gaussian(multiply(test, test), opt.window);
    const Image xy = convolve_gaussian(multiply(reference, test), opt.window);

    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double mx = mu_x.pixels[i];
        const double my = mu_y.pixels[i];
        const double var_x = xx.pixels[i] - mx * mx;
        const double var_y = yy.pixels[i] - my * my;
        const double cov = xy.pixels[i] - mx * my;
        const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        const double den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
        sum += num / den;
    }
    return sum / static_cast<double>(reference.size());
}

double psnr(const Image& reference, const Image& test, double data_range) {
    require_same_dims(reference, test, "psnr");
    const double range = resolve_data_range(reference, data_range, "psnr");
    const double mse = mean_squared_error(reference, test);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(range * range / mse);
}

MetricReport compare_images(const Image& reference, const Image& test, const SsimOptions& opt) {
    MetricReport report;
    report.nmse = nmse(reference, test);
    report.ssim = ssim(reference, test, opt);
    report.psnr = psnr(reference, test, opt.data_range);
    return report;
}

MetricReport compare_patch(const Image& reference, const Image& test, const PatchSpec& patch,
                           const SsimOptions& opt) {
    return compare_images(extract_patch(reference, patch), extract_patch(test, patch), opt);
}

} // namespace collsim
