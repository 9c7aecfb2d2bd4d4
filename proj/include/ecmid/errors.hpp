#pragma once

#include <stdexcept>
#include <string>

namespace ecmid {

/// Base class for every error the library raises.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (bad header, non-numeric cell, duplicate rows).
struct ParseError : Error {
    ParseError(const std::string& msg, long line_number = 0)
        : Error(line_number > 0 ? msg + " (line " + std::to_string(line_number) + ")" : msg),
          line(line_number) {}
    long line;
};

/// Value or container violates a documented invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// Math precondition violated (non-positive frequency, negative gain, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Inconsistent run configuration (sample-rate ratios, aliasing guards).
struct ConfigError : Error {
    using Error::Error;
};

/// The spectrum does not admit the requested frequency selection.
struct SelectionError : Error {
    using Error::Error;
};

/// Measurement lies in a regime where the closed-form step is undefined
/// (e.g. no capacitive imaginary part at the probe frequency).
struct DegenerateInputError : Error {
    using Error::Error;
};

/// A solver step produced a non-physical value; carries the offending
/// number so callers can report how far off the frequency choice was.
struct NonPhysicalError : Error {
    NonPhysicalError(const std::string& msg, double offending)
        : Error(msg), value(offending) {}
    double value;
};

/// Record too short for settling plus the required whole cycles.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// Signal amplitude below the noise floor (includes zero-current division).
struct LowSignalError : Error {
    using Error::Error;
};

/// Caller broke an inter-operation contract (grid mismatch, frequency mismatch).
struct ContractError : Error {
    using Error::Error;
};

/// Requested point lies outside the data range (no extrapolation).
struct RangeError : Error {
    using Error::Error;
};

/// Command-line level mistake (wrong flag combination, missing field).
struct UsageError : Error {
    using Error::Error;
};

} // namespace ecmid
