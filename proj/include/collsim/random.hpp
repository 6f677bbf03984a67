#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace collsim {

/// SplitMix64 finalizer; used to derive well-separated stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a list of
/// context words (input index, sample index, stage tag). Adding more inputs
/// or samples never perturbs the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> words);

/// Stage tags for derive_seed, so each pipeline stage owns its own stream.
inline constexpr std::uint64_t kStageGeometry = 0x67656f6dULL; // "geom"
inline constexpr std::uint64_t kStageNoise = 0x6e6f6973ULL;    // "nois"

/// Seedable random stream. Distributions are generated from raw engine words
/// here rather than through std:: distribution objects, so a given seed
/// reproduces the same values on any standard library.
///
/// Word budget per call: uniform() consumes 1 engine word, normal() exactly 2
/// (Box-Muller, the sine branch is discarded).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1).
    double uniform();

    /// Standard normal draw.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
};

/// Parameter tuple for a truncated normal distribution on [low, high].
struct TruncatedNormal {
    double mean = 0.0;
    double stddev = 1.0;
    double low = 0.0;
    double high = 1.0;
};

/// Throws ConfigError on non-finite parameters, stddev <= 0, or low > high.
void validate_truncated_normal(const TruncatedNormal& params, const char* what);

/// Draws from a normal density restricted to [low, high] by rejection.
///
/// A collapsed interval (low == high) returns the bound directly. Narrow
/// intervals that starve plain normal-proposal rejection fall back to a
/// uniform proposal with an exact accept test; the combined attempt cap is
/// 10^4, after which a ConfigError is thrown.
double sample_truncated_normal(const TruncatedNormal& params, Rng& rng);

/// Mean of the truncated distribution, computed from the normal CDF.
/// Used by tests as an independent oracle and by config reporting.
double truncated_normal_mean(const TruncatedNormal& params);

} // namespace collsim
