#include "collsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "collsim/errors.hpp"

namespace collsim {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t w : words) h = splitmix64(h ^ w);
    return h;
}

double Rng::uniform() {
    // 53 mantissa bits -> [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Box-Muller; u1 in (0, 1] keeps the log finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void validate_truncated_normal(const TruncatedNormal& p, const char* what) {
    if (!std::isfinite(p.mean) || !std::isfinite(p.stddev) || !std::isfinite(p.low) ||
        !std::isfinite(p.high))
        throw ConfigError(std::string(what) + ": truncated normal parameters must be finite");
    if (p.stddev <= 0.0)
        throw ConfigError(std::string(what) + ": truncated normal stddev must be > 0");
    if (p.low > p.high)
        throw ConfigError(std::string(what) + ": truncated normal requires low <= high");
}

double sample_truncated_normal(const TruncatedNormal& p, Rng& rng) {
    validate_truncated_normal(p, "sample_truncated_normal");
    if (p.low == p.high) return p.low;

    constexpr int kTotalCap = 10000;
    constexpr int kNormalPhase = 64;

    int attempts = 0;
    for (; attempts < kNormalPhase; ++attempts) {
        const double x = rng.normal(p.mean, p.stddev);
        if (x >= p.low && x <= p.high) return x;
    }

    // Interval too improbable for the normal proposal; switch to a uniform
    // proposal over [low, high] with accept probability rho(x)/rho(mode),
    // which is an exact truncated-normal sampler for any interval.
    const double mode = std::clamp(p.mean, p.low, p.high);
    const double dm = (mode - p.mean) / p.stddev;
    for (; attempts < kTotalCap; ++attempts) {
        const double x = p.low + (p.high - p.low) * rng.uniform();
        const double dx = (x - p.mean) / p.stddev;
        const double accept = std::exp(0.5 * (dm * dm - dx * dx));
        if (rng.uniform() <= accept) return x;
    }
    throw ConfigError("sample_truncated_normal: rejection cap of 10^4 attempts exceeded");
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

double truncated_normal_mean(const TruncatedNormal& p) {
    validate_truncated_normal(p, "truncated_normal_mean");
    if (p.low == p.high) return p.low;
    const double a = (p.low - p.mean) / p.stddev;
    const double b = (p.high - p.mean) / p.stddev;
    const double mass = normal_cdf(b) - normal_cdf(a);
    if (mass <= 0.0) {
        // Entire interval in a far tail; the density collapses onto the
        // boundary nearest the mean.
        return (a > 0.0) ? p.low : p.high;
    }
    return p.mean + p.stddev * (normal_pdf(a) - normal_pdf(b)) / mass;
}

} // namespace collsim
