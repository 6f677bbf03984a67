#include "collsim/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

Image::Image(int w, int h, double fill)
    : width(w), height(h),
      pixels(static_cast<std::size_t>(w > 0 ? w : 0) * static_cast<std::size_t>(h > 0 ? h : 0),
             fill) {}

bool Image::is_constant() const {
    if (pixels.empty()) return true;
    const double v0 = pixels.front();
    return std::all_of(pixels.begin(), pixels.end(), [v0](double v) { return v == v0; });
}

void validate_image(const Image& img, const char* what) {
    if (img.width < 1 || img.height < 1)
        throw UsageError(std::string(what) + ": image dimensions must be >= 1");
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
        throw UsageError(std::string(what) + ": pixel buffer does not match dimensions");
    for (double v : img.pixels) {
        if (!std::isfinite(v) || v < 0.0)
            throw UsageError(std::string(what) + ": pixel values must be finite and >= 0");
    }
}

Image multiply(const Image& a, const Image& b) {
    if (!a.same_dims(b)) throw UsageError("multiply: image dimensions differ");
    Image out(a.width, a.height);
    for (std::size_t i = 0; i < a.size(); ++i) out.pixels[i] = a.pixels[i] * b.pixels[i];
    return out;
}

Image add(const Image& a, const Image& b) {
    if (!a.same_dims(b)) throw UsageError("add: image dimensions differ");
    Image out(a.width, a.height);
    for (std::size_t i = 0; i < a.size(); ++i) out.pixels[i] = a.pixels[i] + b.pixels[i];
    return out;
}

Image subtract_clamped(const Image& a, const Image& b, std::size_t* clamped) {
    if (!a.same_dims(b)) throw UsageError("subtract_clamped: image dimensions differ");
    Image out(a.width, a.height);
    std::size_t n_clamped = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double v = a.pixels[i] - b.pixels[i];
        if (v < 0.0) {
            out.pixels[i] = 0.0;
            ++n_clamped;
        } else {
            out.pixels[i] = v;
        }
    }
    if (clamped) *clamped = n_clamped;
    return out;
}

double min_value(const Image& img) {
    return *std::min_element(img.pixels.begin(), img.pixels.end());
}

double max_value(const Image& img) {
    return *std::max_element(img.pixels.begin(), img.pixels.end());
}

double mean_value(const Image& img) {
    double sum = 0.0;
    for (double v : img.pixels) sum += v;
    return sum / static_cast<double>(img.size());
}

double percentile(const Image& img, double q) {
    if (img.pixels.empty()) throw UsageError("percentile: empty image");
    if (!(q >= 0.0 && q <= 1.0)) throw UsageError("percentile: q must be in [0, 1]");
    std::vector<double> sorted(img.pixels);
    const auto idx = static_cast<std::size_t>(std::llround(q * (sorted.size() - 1)));
    std::nth_element(sorted.begin(), sorted.begin() + idx, sorted.end());
    return sorted[idx];
}

} // namespace collsim
