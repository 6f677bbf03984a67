#pragma once

// Independent reference implementations the unit tests compare against.
// These deliberately use different algorithms from the library (direct 2-D
// convolution, ray casting, numeric integration) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <vector>

#include "collsim/image.hpp"
#include "collsim/mask.hpp"

namespace oracles {

/// Direct O(n^2 k^2) 2-D convolution with the separable kernel w ⊗ w and
/// replicate (clamp-to-edge) padding.
inline collsim::Image conv2d_brute(const collsim::Image& img, const std::vector<double>& w) {
    const int radius = (static_cast<int>(w.size()) - 1) / 2;
    collsim::Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int sy = std::clamp(y + dy, 0, img.height - 1);
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int sx = std::clamp(x + dx, 0, img.width - 1);
                    acc += w[static_cast<std::size_t>(dy + radius)] *
                           w[static_cast<std::size_t>(dx + radius)] * img.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

/// Point-in-polygon by even-odd ray crossing, with an explicit on-edge test
/// so boundary points count as inside (matching the rasterizer's contract).
inline bool point_in_quad(const collsim::Quad& q, double px, double py) {
    for (std::size_t i = 0; i < 4; ++i) {
        const collsim::Point& a = q[i];
        const collsim::Point& b = q[(i + 1) % 4];
        const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
        if (cross == 0.0 && px >= std::min(a.x, b.x) && px <= std::max(a.x, b.x) &&
            py >= std::min(a.y, b.y) && py <= std::max(a.y, b.y))
            return true;
    }
    bool inside = false;
    for (std::size_t i = 0; i < 4; ++i) {
        const collsim::Point& a = q[i];
        const collsim::Point& b = q[(i + 1) % 4];
        if ((a.y > py) != (b.y > py)) {
            const double x_cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            if (px < x_cross) inside = !inside;
        }
    }
    return inside;
}

/// Rasterization oracle: classify every pixel center independently.
inline collsim::BinaryMask fill_quad_oracle(const collsim::Quad& q, int width, int height) {
    collsim::BinaryMask mask(width, height, 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (point_in_quad(q, x + 0.5, y + 0.5)) mask.at(x, y) = 0;
    return mask;
}

struct TruncatedMoments {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Mean and standard deviation of a normal(mean, stddev) restricted to
/// [low, high], via Simpson integration of the unnormalized density.
inline TruncatedMoments truncated_moments_numeric(double mean, double stddev, double low,
                                                  double high) {
    const int n = 20000; // even
    const double h = (high - low) / n;
    auto density = [&](double x) {
        const double z = (x - mean) / stddev;
        return std::exp(-0.5 * z * z);
    };
    double z0 = 0.0, z1 = 0.0, z2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = low + h * i;
        const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double f = weight * density(x);
        z0 += f;
        z1 += f * x;
        z2 += f * x * x;
    }
    TruncatedMoments m;
    m.mean = z1 / z0;
    const double second = z2 / z0;
    m.stddev = std::sqrt(std::max(0.0, second - m.mean * m.mean));
    return m;
}

/// Closed-form SSIM of two constant images (contrast/structure terms are 1).
inline double ssim_constants(double a, double b, double k1, double data_range) {
    const double c1 = (k1 * data_range) * (k1 * data_range);
    return (2.0 * a * b + c1) / (a * a + b * b + c1);
}

} // namespace oracles
