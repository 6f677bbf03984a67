#include "collsim/phantom.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

namespace {

void check_size(int size) {
    if (size < 1) throw ConfigError("phantom: size must be >= 1");
}

} // namespace

Image flat_phantom(int size, double i0) {
    check_size(size);
    return Image(size, size, 0.95 * i0);
}

Image disk_phantom(int size, double i0) {
    check_size(size);
    Image img(size, size);
    const double cx = size / 2.0;
    const double cy = size / 2.0;
    const double radius = 0.35 * size;
    const double rim = std::max(1.0, 0.06 * size);
    const double bright = 0.95 * i0;
    const double dark = 0.45 * i0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double r = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
            double v;
            if (r <= radius - rim) {
                v = dark;
            } else if (r >= radius + rim) {
                v = bright;
            } else {
                // Cosine ramp from dark to bright across the rim.
                const double t = (r - (radius - rim)) / (2.0 * rim);
                v = dark + (bright - dark) * 0.5 * (1.0 - std::cos(std::numbers::pi * t));
            }
            img.at(x, y) = v;
        }
    }
    return img;
}

Image step_phantom(int size, double i0) {
    check_size(size);
    Image img(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) img.at(x, y) = (x < size / 2 ? 0.45 : 0.95) * i0;
    return img;
}

Image gradient_phantom(int size, double i0) {
    check_size(size);
    Image img(size, size);
    const double n = static_cast<double>(size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = (x + 0.5) / n;
            const double v = (y + 0.5) / n;
            const double lobe1 =
                std::exp(-((u - 0.32) * (u - 0.32) + (v - 0.45) * (v - 0.45)) / (2.0 * 0.03));
            const double lobe2 =
                std::exp(-((u - 0.68) * (u - 0.68) + (v - 0.45) * (v - 0.45)) / (2.0 * 0.03));
            double level = 0.95 - 0.08 * v - 0.35 * (lobe1 + lobe2);
            if (level < 0.3) level = 0.3;
            img.at(x, y) = level * i0;
        }
    }
    return img;
}

Image make_phantom(const std::string& kind, int size, double i0) {
    if (kind == "flat") return flat_phantom(size, i0);
    if (kind == "disk") return disk_phantom(size, i0);
    if (kind == "step") return step_phantom(size, i0);
    if (kind == "gradient") return gradient_phantom(size, i0);
    throw ConfigError("phantom: unknown kind '" + kind + "' (want flat, disk, step or gradient)");
}

} // namespace collsim
