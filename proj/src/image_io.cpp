#include "collsim/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "collsim/errors.hpp"

namespace collsim {

namespace {

constexpr char kRawMagic[8] = {'C', 'S', 'I', 'M', 'R', 'A', 'W', '1'};
constexpr std::size_t kMaxPixels = std::size_t{1} << 31;

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

[[noreturn]] void io_fail(const std::string& path, const std::string& reason) {
    throw IoError(path + ": " + reason);
}

// Skips netpbm whitespace and '#' comment lines, then reads one token.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    return tok;
}

long parse_dim(const std::string& tok, const std::string& path, const char* name) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        io_fail(path, std::string("malformed ") + name + " field '" + tok + "'");
    long v = 0;
    for (char ch : tok) {
        v = v * 10 + (ch - '0');
        if (v > (1L << 30)) io_fail(path, std::string(name) + " overflows");
    }
    return v;
}

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open for reading");
    if (pnm_token(in) != "P5") io_fail(path, "not a binary PGM (expected magic P5)");
    const long width = parse_dim(pnm_token(in), path, "width");
    const long height = parse_dim(pnm_token(in), path, "height");
    const long maxval = parse_dim(pnm_token(in), path, "maxval");
    if (width < 1 || height < 1) io_fail(path, "dimensions must be >= 1");
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) > kMaxPixels)
        io_fail(path, "dimension overflow");
    if (maxval != 255 && maxval != 65535)
        io_fail(path, "unsupported maxval " + std::to_string(maxval) + " (want 255 or 65535)");

    Image img(static_cast<int>(width), static_cast<int>(height));
    const std::size_t n = img.size();
    if (maxval == 255) {
        std::vector<unsigned char> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) io_fail(path, "truncated pixel data");
        for (std::size_t i = 0; i < n; ++i) img.pixels[i] = buf[i];
    } else {
        std::vector<unsigned char> buf(n * 2);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2));
        if (static_cast<std::size_t>(in.gcount()) != n * 2) io_fail(path, "truncated pixel data");
        for (std::size_t i = 0; i < n; ++i)
            img.pixels[i] = static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]);
    }
    return img;
}

void save_pgm(const Image& img, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        io_fail(path, "unsupported bit depth " + std::to_string(bit_depth) + " (want 8 or 16)");
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
    out << "P5\n" << img.width << " " << img.height << "\n" << static_cast<long>(maxval) << "\n";
    // nearbyint under the default rounding mode = round half to even.
    if (bit_depth == 8) {
        std::vector<unsigned char> buf(img.size());
        for (std::size_t i = 0; i < img.size(); ++i)
            buf[i] = static_cast<unsigned char>(
                std::nearbyint(std::clamp(img.pixels[i], 0.0, maxval)));
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<unsigned char> buf(img.size() * 2);
        for (std::size_t i = 0; i < img.size(); ++i) {
            const auto v = static_cast<std::uint16_t>(
                std::nearbyint(std::clamp(img.pixels[i], 0.0, maxval)));
            buf[2 * i] = static_cast<unsigned char>(v >> 8);
            buf[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) io_fail(path, "write failed");
}

Image load_rawf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open for reading");
    char header[16];
    in.read(header, 16);
    if (in.gcount() != 16) io_fail(path, "truncated header (want 16 bytes)");
    if (std::memcmp(header, kRawMagic, 8) != 0) io_fail(path, "bad magic (want CSIMRAW1)");
    std::uint32_t w32 = 0, h32 = 0;
    std::memcpy(&w32, header + 8, 4);
    std::memcpy(&h32, header + 12, 4);
    if (w32 < 1 || h32 < 1) io_fail(path, "dimensions must be >= 1");
    if (static_cast<std::size_t>(w32) * h32 > kMaxPixels || w32 > (1u << 30) || h32 > (1u << 30))
        io_fail(path, "dimension overflow");

    Image img(static_cast<int>(w32), static_cast<int>(h32));
    std::vector<float> buf(img.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != buf.size() * sizeof(float))
        io_fail(path, "truncated pixel data");
    for (std::size_t i = 0; i < buf.size(); ++i) {
        if (!std::isfinite(buf[i]) || buf[i] < 0.0f)
            io_fail(path, "pixel values must be finite and >= 0");
        img.pixels[i] = buf[i];
    }
    return img;
}

void save_rawf(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    char header[16];
    std::memcpy(header, kRawMagic, 8);
    const auto w32 = static_cast<std::uint32_t>(img.width);
    const auto h32 = static_cast<std::uint32_t>(img.height);
    std::memcpy(header + 8, &w32, 4);
    std::memcpy(header + 12, &h32, 4);
    out.write(header, 16);
    std::vector<float> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = static_cast<float>(img.pixels[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) io_fail(path, "write failed");
}

} // namespace

Image load_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".pgm") return load_pgm(path);
    if (ext == ".rawf") return load_rawf(path);
    io_fail(path, "unsupported image extension '" + ext + "' (want .pgm or .rawf)");
}

void save_image(const Image& img, const std::string& path, int bit_depth) {
    validate_image(img, "save_image");
    const std::string ext = lower_ext(path);
    if (ext == ".pgm") return save_pgm(img, path, bit_depth);
    if (ext == ".rawf") return save_rawf(img, path);
    io_fail(path, "unsupported image extension '" + ext + "' (want .pgm or .rawf)");
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<unsigned char> buf(mask.values.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = mask.values[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) io_fail(path, "write failed");
}

BinaryMask load_mask(const std::string& path) {
    const Image img = load_pgm(path);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        mask.values[i] = img.pixels[i] != 0.0 ? 1 : 0;
    return mask;
}

} // namespace collsim
