#pragma once

#include <string>

#include "collsim/image.hpp"

namespace collsim {

/// Synthetic open-field phantoms used as test fixtures and demo inputs.
/// All are deterministic closed forms; `i0` sets the unattenuated level.

/// Constant open field at 0.95 * i0.
Image flat_phantom(int size, double i0 = 10000.0);

/// Bright field with a darker centered disk (smooth cosine rim).
Image disk_phantom(int size, double i0 = 10000.0);

/// Vertical step: left half at 0.45 * i0, right half at 0.95 * i0.
Image step_phantom(int size, double i0 = 10000.0);

/// Thorax-like field: bright background, two attenuating lobes and a gentle
/// vertical gradient.
Image gradient_phantom(int size, double i0 = 10000.0);

/// Phantom by name ("flat", "disk", "step", "gradient"); throws ConfigError
/// on an unknown name.
Image make_phantom(const std::string& kind, int size, double i0 = 10000.0);

} // namespace collsim
