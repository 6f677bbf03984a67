#pragma once

#include <stdexcept>
#include <string>

namespace collsim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter values (distribution bounds, kernel sigma, damping range, ...).
/// Maps to exit code 2 in the CLI.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Caller-side misuse: dimension mismatches, patches out of bounds, images too small.
class UsageError : public Error {
public:
    using Error::Error;
};

/// File I/O problems; messages carry the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Scatter calibration could not bracket or reach the target fraction.
class CalibrationError : public Error {
public:
    using Error::Error;
};

} // namespace collsim
