#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "collsim/convolve.hpp"
#include "collsim/image.hpp"
#include "collsim/random.hpp"

namespace collsim {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Corner order is TL, TR, BR, BL of the undistorted rectangle.
using Quad = std::array<Point, 4>;

/// One sampled collimator instance. All lengths are in pixels, rotation in
/// radians (about the centroid, positive towards +y which points down the
/// image). corner_offsets hold the distortion jitter as dx0,dy0,...,dx3,dy3
/// applied to the rotated corners.
struct CollimatorSpec {
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double rotation = 0.0;
    std::array<double, 8> corner_offsets{};
    double damping = 0.03; // transmission inside the shadow, in (0, 1]
};

/// Truncated-normal tuples for every sampled collimator quantity.
///
/// Geometric tuples are in image-relative units so one config drives inputs
/// of any size: centroid_x_frac / width_frac scale by image width,
/// centroid_y_frac / height_frac by image height, corner_jitter_frac by the
/// image diagonal. rotation_rad and damping are absolute.
struct SamplingDistributions {
    TruncatedNormal centroid_x_frac{0.5, 0.12, 0.1, 0.9};
    TruncatedNormal centroid_y_frac{0.5, 0.12, 0.1, 0.9};
    TruncatedNormal width_frac{0.55, 0.18, 0.2, 0.9};
    TruncatedNormal height_frac{0.55, 0.18, 0.2, 0.9};
    TruncatedNormal rotation_rad{0.0, 6.0 * kDegToRad, -15.0 * kDegToRad, 15.0 * kDegToRad};
    TruncatedNormal corner_jitter_frac{0.0, 0.01, -0.03, 0.03};
    TruncatedNormal damping{0.03, 0.005, 0.02, 0.04};
};

/// Throws ConfigError if any tuple is invalid, size tuples admit
/// non-positive extents, or damping bounds leave (0, 1].
void validate_sampling_distributions(const SamplingDistributions& dists);

/// Pixel-exact label mask: 0 = inside collimator shadow, 1 = open field.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 1);

    std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count_zeros() const;
};

/// Per-pixel transmission map: 1 outside the shadow, the damping factor
/// inside; stays within (0, 1] after the focal-spot blur.
struct DampedMask {
    int width = 0;
    int height = 0;
    std::vector<double> transmission;
};

/// Row-major run-length encoding of a BinaryMask, written into the dataset
/// manifest as a sidecar next to the raster mask file.
struct MaskRle {
    std::uint8_t first = 1;           // value of the first run
    std::vector<std::uint64_t> runs;  // lengths, alternating values
};

MaskRle rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const MaskRle& rle, int width, int height);

/// Undistorted axis-aligned corners of the spec's rectangle.
Quad base_quad(const CollimatorSpec& spec);

/// Rotates every corner about (cx, cy).
Quad rotate_quad(const Quad& quad, double angle, double cx, double cy);

/// Corners after rotation and per-corner distortion offsets.
Quad quad_from_spec(const CollimatorSpec& spec);

/// True when the corner sequence encloses a convex, non-self-intersecting
/// region with nonzero area (coincident corners degenerating to a triangle
/// are accepted).
bool quad_is_convex(const Quad& quad);

/// Fills the convex quadrilateral with 0 (shadow) on an all-ones mask.
/// A pixel belongs to the shadow when its center (x + 0.5, y + 0.5) lies
/// inside or on the boundary of the quad; regions outside the image are
/// clipped. Pure geometry, no RNG: bit-identical for a given quad.
/// Throws ConfigError if the quad is not convex.
BinaryMask fill_quad(const Quad& quad, int width, int height);

/// Rasterizes the spec's transformed rectangle: corners from
/// centroid/width/height, rotated by `rotation`, shifted by corner_offsets,
/// then filled via fill_quad.
BinaryMask rasterize(const CollimatorSpec& spec, int width, int height);

/// Draws a CollimatorSpec for an image of the given size. Deterministic in
/// (dists, rng state); the draw order is part of the format contract:
///   centroid_x, centroid_y, width, height, rotation,
///   corner offsets dx0,dy0,dx1,dy1,dx2,dy2,dx3,dy3, damping.
/// If the distorted quad comes out non-convex only the 8 offsets are
/// redrawn, up to 100 retries, then ConfigError. Each truncated-normal draw
/// consumes a variable number of engine words (rejection), so replay always
/// starts from the stream's seed.
CollimatorSpec sample_spec(const SamplingDistributions& dists, int width, int height, Rng& rng);

/// Damping factor applied to shadow pixels: transmission = damping where
/// mask = 0, 1 elsewhere. Throws ConfigError unless damping is in (0, 1].
DampedMask mask_to_damped(const BinaryMask& mask, double damping);

/// Focal-spot blur of the transmission map. The result is clamped to the
/// convex hull [min(transmission), 1] of the input values, which the blur
/// can only leave by floating-point rounding.
DampedMask blur_transmission(const DampedMask& damped, const GaussianKernelSpec& focal_blur);

} // namespace collsim
