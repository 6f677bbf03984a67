#pragma once

// Shared helpers for the unit tests: disposable directories, random fixture
// images, and file slurping.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "collsim/image.hpp"

namespace testutil {

/// Fresh directory under the test working directory; wiped at construction
/// so reruns start clean, left behind afterwards for inspection.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& name)
        : path(std::filesystem::current_path() / "scratch" / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline collsim::Image random_image(int width, int height, std::uint64_t seed, double low = 0.0,
                                   double high = 1000.0) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> dist(low, high);
    collsim::Image img(width, height);
    for (double& v : img.pixels) v = dist(engine);
    return img;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline double max_abs_diff(const collsim::Image& a, const collsim::Image& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a.pixels[i] - b.pixels[i]);
        if (d > worst) worst = d;
    }
    return worst;
}

inline bool bitwise_equal(const collsim::Image& a, const collsim::Image& b) {
    return a.same_dims(b) && a.pixels == b.pixels;
}

} // namespace testutil
