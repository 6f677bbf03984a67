#include "collsim/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

void validate_sampling_distributions(const SamplingDistributions& d) {
    const struct {
        const TruncatedNormal* t;
        const char* name;
    } tuples[] = {
        {&d.centroid_x_frac, "centroid_x_frac"}, {&d.centroid_y_frac, "centroid_y_frac"},
        {&d.width_frac, "width_frac"},           {&d.height_frac, "height_frac"},
        {&d.rotation_rad, "rotation_rad"},       {&d.corner_jitter_frac, "corner_jitter_frac"},
        {&d.damping, "damping"},
    };
    for (const auto& tup : tuples) {
        validate_truncated_normal(*tup.t, tup.name);
        if (tup.t->low > tup.t->mean || tup.t->mean > tup.t->high)
            throw ConfigError(std::string(tup.name) + ": requires low <= mean <= high");
    }
    if (d.width_frac.low <= 0.0 || d.height_frac.low <= 0.0)
        throw ConfigError("width_frac/height_frac bounds must be > 0");
    if (d.damping.low <= 0.0 || d.damping.high > 1.0)
        throw ConfigError("damping bounds must lie inside (0, 1]");
}

BinaryMask::BinaryMask(int w, int h, std::uint8_t fill)
    : width(w), height(h),
      values(static_cast<std::size_t>(w > 0 ? w : 0) * static_cast<std::size_t>(h > 0 ? h : 0),
             fill) {}

std::size_t BinaryMask::count_zeros() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{0}));
}

MaskRle rle_encode(const BinaryMask& mask) {
    MaskRle rle;
    if (mask.values.empty()) return rle;
    rle.first = mask.values.front();
    std::uint64_t run = 0;
    std::uint8_t current = rle.first;
    for (std::uint8_t v : mask.values) {
        if (v == current) {
            ++run;
        } else {
            rle.runs.push_back(run);
            current = v;
            run = 1;
        }
    }
    rle.runs.push_back(run);
    return rle;
}

BinaryMask rle_decode(const MaskRle& rle, int width, int height) {
    BinaryMask mask(width, height, 1);
    std::size_t pos = 0;
    std::uint8_t value = rle.first;
    for (std::uint64_t run : rle.runs) {
        if (pos + run > mask.values.size()) throw UsageError("rle_decode: runs exceed mask size");
        std::fill_n(mask.values.begin() + pos, run, value);
        pos += run;
        value = static_cast<std::uint8_t>(1 - value);
    }
    if (pos != mask.values.size()) throw UsageError("rle_decode: runs do not cover the mask");
    return mask;
}

Quad base_quad(const CollimatorSpec& spec) {
    const double hw = spec.width / 2.0;
    const double hh = spec.height / 2.0;
    return Quad{{{spec.centroid_x - hw, spec.centroid_y - hh},
                 {spec.centroid_x + hw, spec.centroid_y - hh},
                 {spec.centroid_x + hw, spec.centroid_y + hh},
                 {spec.centroid_x - hw, spec.centroid_y + hh}}};
}

Quad rotate_quad(const Quad& quad, double angle, double cx, double cy) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Quad out;
    for (std::size_t i = 0; i < 4; ++i) {
        const double dx = quad[i].x - cx;
        const double dy = quad[i].y - cy;
        out[i].x = cx + c * dx - s * dy;
        out[i].y = cy + s * dx + c * dy;
    }
    return out;
}

Quad quad_from_spec(const CollimatorSpec& spec) {
    Quad q = rotate_quad(base_quad(spec), spec.rotation, spec.centroid_x, spec.centroid_y);
    for (std::size_t i = 0; i < 4; ++i) {
        q[i].x += spec.corner_offsets[2 * i];
        q[i].y += spec.corner_offsets[2 * i + 1];
    }
    return q;
}

namespace {

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double edge_cross(const Point& a, const Point& b, double px, double py) {
    return cross(b.x - a.x, b.y - a.y, px - a.x, py - a.y);
}

} // namespace

bool quad_is_convex(const Quad& q) {
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t i = 0; i < 4; ++i) {
        const Point& a = q[i];
        const Point& b = q[(i + 1) % 4];
        const Point& c = q[(i + 2) % 4];
        const double z = cross(b.x - a.x, b.y - a.y, c.x - b.x, c.y - b.y);
        if (z > 0.0) has_pos = true;
        if (z < 0.0) has_neg = true;
    }
    // Mixed signs: reflex corner or bowtie. All zero: degenerate (no area).
    return has_pos != has_neg;
}

BinaryMask fill_quad(const Quad& q, int width, int height) {
    if (width < 1 || height < 1) throw UsageError("fill_quad: dimensions must be >= 1");
    if (!quad_is_convex(q))
        throw ConfigError("fill_quad: corner offsets produced a non-convex quadrilateral");

    // Orientation via the shoelace sum; sign-normalize the half-plane tests.
    double area2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const Point& a = q[i];
        const Point& b = q[(i + 1) % 4];
        area2 += a.x * b.y - b.x * a.y;
    }
    const double orient = area2 > 0.0 ? 1.0 : -1.0;

    BinaryMask mask(width, height, 1);

    double min_x = q[0].x, max_x = q[0].x, min_y = q[0].y, max_y = q[0].y;
    for (const Point& p : q) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(max_x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(max_y)));

    for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5;
            bool inside = true;
            for (std::size_t i = 0; i < 4; ++i) {
                // Boundary pixels count as shadow (>= 0 keeps the edge).
                if (orient * edge_cross(q[i], q[(i + 1) % 4], px, py) < 0.0) {
                    inside = false;
                    break;
                }
            }
            if (inside) mask.at(x, y) = 0;
        }
    }
    return mask;
}

BinaryMask rasterize(const CollimatorSpec& spec, int width, int height) {
    if (!(spec.width > 0.0) || !(spec.height > 0.0))
        throw ConfigError("rasterize: spec width/height must be > 0");
    if (!(spec.damping > 0.0) || spec.damping > 1.0)
        throw ConfigError("rasterize: spec damping must be in (0, 1]");
    return fill_quad(quad_from_spec(spec), width, height);
}

CollimatorSpec sample_spec(const SamplingDistributions& dists, int width, int height, Rng& rng) {
    validate_sampling_distributions(dists);
    if (width < 1 || height < 1) throw UsageError("sample_spec: dimensions must be >= 1");

    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);
    const double diag = std::hypot(w, h);

    CollimatorSpec spec;
    spec.centroid_x = sample_truncated_normal(dists.centroid_x_frac, rng) * w;
    spec.centroid_y = sample_truncated_normal(dists.centroid_y_frac, rng) * h;
    spec.width = sample_truncated_normal(dists.width_frac, rng) * w;
    spec.height = sample_truncated_normal(dists.height_frac, rng) * h;
    spec.rotation = sample_truncated_normal(dists.rotation_rad, rng);

    constexpr int kConvexityRetries = 100;
    for (int attempt = 0; attempt < kConvexityRetries; ++attempt) {
        for (double& off : spec.corner_offsets)
            off = sample_truncated_normal(dists.corner_jitter_frac, rng) * diag;
        if (quad_is_convex(quad_from_spec(spec))) {
            spec.damping = sample_truncated_normal(dists.damping, rng);
            return spec;
        }
    }
    throw ConfigError("sample_spec: corner jitter kept producing non-convex quads");
}

DampedMask mask_to_damped(const BinaryMask& mask, double damping) {
    if (!(damping > 0.0) || damping > 1.0 || !std::isfinite(damping))
        throw ConfigError("mask_to_damped: damping must be in (0, 1]");
    DampedMask out;
    out.width = mask.width;
    out.height = mask.height;
    out.transmission.resize(mask.values.size());
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        out.transmission[i] = mask.values[i] ? 1.0 : damping;
    return out;
}

DampedMask blur_transmission(const DampedMask& damped, const GaussianKernelSpec& focal_blur) {
    Image img;
    img.width = damped.width;
    img.height = damped.height;
    img.pixels = damped.transmission;
    Image blurred = convolve_gaussian(img, focal_blur);

    const double lo = *std::min_element(damped.transmission.begin(), damped.transmission.end());
    DampedMask out;
    out.width = damped.width;
    out.height = damped.height;
    out.transmission = std::move(blurred.pixels);
    for (double& v : out.transmission) v = std::clamp(v, lo, 1.0);
    return out;
}

} // namespace collsim
