#pragma once

#include <cstddef>
#include <vector>

namespace collsim {

/// 2-D grid of non-negative detector intensities (linear domain, not
/// log-transformed). Row-major storage, pixels[y * width + x].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0);

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return pixels.size(); }
    bool same_dims(const Image& other) const {
        return width == other.width && height == other.height;
    }
    bool is_constant() const;
};

/// Throws UsageError unless the image has positive dimensions, a matching
/// pixel buffer, and only finite non-negative values.
void validate_image(const Image& img, const char* what);

/// Pointwise product; dimensions must agree.
Image multiply(const Image& a, const Image& b);

/// Pointwise sum; dimensions must agree.
Image add(const Image& a, const Image& b);

/// a - b clamped below at 0. Counts clamped pixels into *clamped if given.
Image subtract_clamped(const Image& a, const Image& b, std::size_t* clamped = nullptr);

double min_value(const Image& img);
double max_value(const Image& img);
double mean_value(const Image& img);

/// Nearest-rank percentile of the pixel values, q in [0, 1].
double percentile(const Image& img, double q);

} // namespace collsim
