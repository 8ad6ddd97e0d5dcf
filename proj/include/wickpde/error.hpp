#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wickpde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad grid, bad cutoff, malformed config).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A non-finite value appeared in a field.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// A time stepper produced a non-finite state.
class BlowUpError : public NonFiniteError {
public:
    BlowUpError(const std::string& where, std::int64_t step)
        : NonFiniteError(where + ": non-finite state at step " + std::to_string(step)),
          step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// Dataset I/O, format, or integrity failure.
class IoError : public Error {
public:
    using Error::Error;
};

class ChecksumError : public IoError {
public:
    using IoError::IoError;
};

/// Malformed file: bad magic, unknown version, truncation, or shape mismatch.
class FormatError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace wickpde
