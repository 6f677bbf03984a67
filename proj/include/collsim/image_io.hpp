#pragma once

#include <string>

#include "collsim/image.hpp"
#include "collsim/mask.hpp"

namespace collsim {

/// Loads a single-channel image. The format is chosen by extension:
///   .pgm  — binary (P5) netpbm, 8-bit or 16-bit (big-endian) by maxval
///   .rawf — raw float32 grid: 16-byte header ("CSIMRAW1" magic, u32 width,
///           u32 height, little-endian) followed by row-major float32 data
/// Errors carry the file path and reason.
Image load_image(const std::string& path);

/// Saves an image. .pgm clamps to [0, maxval] and rounds half-to-even at
/// the requested bit depth (8 or 16). .rawf stores float32 and ignores
/// bit_depth; a float32 load/save round trip is lossless.
void save_image(const Image& img, const std::string& path, int bit_depth = 16);

/// Mask raster export: 8-bit PGM with 0 = shadow, 255 = open field.
void save_mask(const BinaryMask& mask, const std::string& path);

/// Inverse of save_mask; any nonzero sample maps to open field.
BinaryMask load_mask(const std::string& path);

} // namespace collsim
